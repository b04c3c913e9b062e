import numpy as np
import pytest

from awwlab import exact as X
from awwlab.errors import CouplingValidationError, DiscretizationError, ResolutionError


def test_mode_grid_reproduces_correlation(ref_bath):
    from awwlab import bath as B
    modes = X.discretize_bath(ref_bath, 0.05)
    xs = np.linspace(0.0, 20.0, 313)
    err = np.max(np.abs(modes.discrete_correlation(xs) - B.correlation(ref_bath, xs)))
    assert err < 1e-4
    assert modes.achieved_error < 1e-4
    assert np.all(modes.weights > 0.0)
    assert np.all(np.diff(modes.omegas) > 0.0)


def test_mode_grid_failure_reports_error(ref_bath):
    with pytest.raises(DiscretizationError) as err:
        X.discretize_bath(ref_bath, 0.05, tol_corr=1e-14, max_doublings=0)
    assert err.value.achieved > 1e-14


def test_free_propagation_conserves_atom_norm(ref_scenario, ref_frame):
    modes = X.discretize_bath(ref_scenario.bath, 0.1)
    traj = X.propagate_exact(ref_scenario.atom, ref_frame, modes,
                             ref_scenario.z0, 0.1, 0.0)
    assert np.max(np.abs(np.linalg.norm(traj.z, axis=1) - 1.0)) < 1e-8
    assert np.max(np.abs(traj.field)) == 0.0


def test_total_norm_conserved_with_coupling(exact_runner):
    traj, _ = exact_runner(0.05, float(np.sqrt(0.05)))
    assert np.max(traj.norm_defect) < 1e-8


def test_populations_partition_unity(exact_runner, ref_frame):
    traj, _ = exact_runner(0.05, float(np.sqrt(0.05)))
    p, p_down = X.populations(traj, ref_frame)
    total = p.sum(axis=1) + p_down
    assert np.max(np.abs(total - 1.0)) < 1e-8
    assert np.all(p >= -1e-12) and np.all(p_down >= -1e-12)


def test_field_amplitude_closed_form(ref_scenario, ref_frame):
    eps, lam = 0.05, float(np.sqrt(0.05))
    modes = X.discretize_bath(ref_scenario.bath, eps)
    traj = X.propagate_exact(ref_scenario.atom, ref_frame, modes,
                             ref_scenario.z0, eps, lam, bath=ref_scenario.bath,
                             override_smallness=True, record_source=True)
    f_closed = X.field_amplitude_closed_form(traj, modes, eps, lam, 1.0)
    assert np.max(np.abs(f_closed - traj.field[-1])) < 1e-4


def test_field_reconstruction_requires_history(exact_runner, ref_frame):
    traj, modes = exact_runner(0.1, float(np.sqrt(0.1)))
    with pytest.raises(ResolutionError):
        X.field_amplitude_closed_form(traj, modes, 0.1, np.sqrt(0.1), 1.0)


def test_smallness_gate(ref_scenario, ref_frame):
    modes = X.discretize_bath(ref_scenario.bath, 0.05)
    with pytest.raises(CouplingValidationError):
        X.propagate_exact(ref_scenario.atom, ref_frame, modes, ref_scenario.z0,
                          0.05, np.sqrt(0.05), bath=ref_scenario.bath)


def test_initial_state_must_be_normalized(ref_scenario, ref_frame):
    modes = X.discretize_bath(ref_scenario.bath, 0.1)
    with pytest.raises(ValueError):
        X.propagate_exact(ref_scenario.atom, ref_frame, modes,
                          np.array([2.0, 0.0]), 0.1, 0.0)


def test_davies_population_cross_check(exact_runner, ref_frame, ref_bath):
    # along lam^2 = eps the surviving upper population approaches
    # exp(-2 int beta_1) with an O(eps) defect
    from awwlab import bath as B
    beta1, _ = B.decay_and_shift(ref_bath, 1.0, 1.0)
    pred = np.exp(-2.0 * beta1)
    for eps, c_max in ((0.1, 0.3), (0.05, 0.3)):
        traj, _ = exact_runner(eps, float(np.sqrt(eps)))
        p, _ = X.populations(traj, ref_frame)
        assert abs(p[-1, 0] - pred) < c_max * eps
