import numpy as np
import pytest

from awwlab import asymptotics as Y, atom as A, bath as B
from awwlab.errors import WellCouplednessError


def test_leading_order_initial_value(ref_scenario, ref_frame, ref_tables):
    z = Y.leading_order_z(ref_frame, ref_scenario.bath, ref_scenario.atom,
                          0.05, 0.1, ref_scenario.z0, 0.0, tables=ref_tables)
    assert np.allclose(z, ref_scenario.z0)


def test_leading_order_norm_formula(ref_scenario, ref_frame, ref_tables):
    eps, lam = 0.05, np.sqrt(0.05)
    z0 = np.array([0.6, 0.8], dtype=complex)
    for t in (0.3, 1.0):
        z = Y.leading_order_z(ref_frame, ref_scenario.bath, ref_scenario.atom,
                              eps, lam, z0, t, tables=ref_tables)
        decay = np.exp(-2.0 * (lam**2 / eps) * np.asarray(ref_tables.int_beta(t)))
        v0 = ref_frame.vectors_at(0.0)
        weights = np.abs(v0.conj().T @ z0) ** 2
        assert np.linalg.norm(z) ** 2 == pytest.approx(float(decay @ weights),
                                                       abs=1e-10)


def test_leading_order_norm_nonincreasing(ref_scenario, ref_frame, ref_tables):
    ts = np.linspace(0.0, 1.0, 101)
    z = Y.leading_order_z(ref_frame, ref_scenario.bath, ref_scenario.atom,
                          0.05, np.sqrt(0.05), ref_scenario.z0, ts,
                          tables=ref_tables)
    norms = np.linalg.norm(z, axis=1)
    assert np.all(np.diff(norms) <= 1e-12)


def test_leading_order_gauge_invariant_populations(ref_scenario, ref_bath):
    # same path, different eigenvector gauge: populations must agree
    def ham(t):
        return ref_scenario.atom.hamiltonian(t)

    def provider(t):
        th = np.pi * t / 4.0
        c, s = np.cos(th), np.sin(th)
        chi = np.exp(1j * 0.7 * t)
        cols = np.array([[c * chi, -s], [s * chi, c]])
        return np.array([1.0, 2.0 + 0.3 * t]), cols

    regauged = A.AtomPath(dim=2, hamiltonian=ham,
                          coupling=ref_scenario.atom.coupling,
                          eigvec_provider=provider)
    frame_a = ref_scenario.frame()
    frame_b = A.eigenframe(regauged, np.linspace(0.0, 1.0, 801))
    eps, lam = 0.05, np.sqrt(0.05)
    for t in (0.4, 1.0):
        za = Y.leading_order_z(frame_a, ref_bath, ref_scenario.atom, eps, lam,
                               ref_scenario.z0, t)
        zb = Y.leading_order_z(frame_b, ref_bath, regauged, eps, lam,
                               ref_scenario.z0, t)
        pa = np.abs(frame_a.vectors_at(t).conj().T @ za) ** 2
        pb = np.abs(frame_b.vectors_at(t).conj().T @ zb) ** 2
        assert np.allclose(pa, pb, atol=1e-9)


def test_population_approx_closed_form(ref_bath):
    # constant level at alpha = 1 with unit coupling: survival e^{-2 pi/e}
    atom = A.diag_rotation_atom(
        level_funcs=(lambda t: 1.0, lambda t: 2.0),
        theta_func=lambda t: 0.0,
        coupling_func=lambda t: np.array([1.0, 1.0]),
    )
    frame = A.eigenframe(atom, np.linspace(0.0, 1.0, 201))
    val = Y.population_approx(frame, ref_bath, 0.05, np.sqrt(0.05), 1.0, 0, 1.0,
                              atom=atom)
    assert val == pytest.approx(np.exp(-2.0 * np.pi * np.exp(-1.0)), abs=1e-8)
    assert Y.population_approx(frame, ref_bath, 0.05, 0.0, 0.7, 0, 0.9,
                               atom=atom) == pytest.approx(0.7)


def test_regime_classification_thresholds():
    assert Y.regime_classify(0.01, np.sqrt(0.1)).regime == "strong"
    assert Y.regime_classify(0.05, np.sqrt(0.05)).regime == "davies"
    assert Y.regime_classify(0.1, np.sqrt(0.1**3)).regime == "weak_b"
    assert Y.regime_classify(0.01, np.sqrt(5e-4)).regime == "weak_a"
    with pytest.raises(ValueError):
        Y.regime_classify(0.0, 0.1)


def test_regime_predictions(ref_tables):
    strong = Y.regime_classify(0.01, np.sqrt(0.1), tables=ref_tables)
    assert strong.p_down > 0.999
    weak = Y.regime_classify(0.1, np.sqrt(0.1**3), tables=ref_tables)
    assert weak.p_down < 0.1


def test_strong_coupling_survival_bound(ref_scenario, ref_frame, ref_tables):
    eps, lam = 0.01, np.sqrt(0.1)
    z = Y.leading_order_z(ref_frame, ref_scenario.bath, ref_scenario.atom,
                          eps, lam, ref_scenario.z0, 1.0, tables=ref_tables)
    min_decay = float(np.min(ref_tables.int_beta(1.0)))
    assert np.linalg.norm(z) <= np.exp(-(lam**2 / eps) * min_decay) + 1e-12


def test_semigroup_lambda_zero_matches_exponential(ref_bath):
    import scipy.linalg as sla
    a = np.diag([1.0, 2.0])
    v = np.array([1.0, 1.0])
    z0 = np.array([0.6, 0.8], dtype=complex)
    t = 4.2
    z = Y.semigroup_time_independent(a, v, ref_bath, 0.0, z0, t)
    assert np.allclose(z, sla.expm(-1j * t * a) @ z0, atol=1e-12)


def test_semigroup_generator_dissipative(ref_bath):
    a = np.diag([1.0, 2.0])
    v = np.array([1.0, 1.0])
    z0 = np.array([1.0, 0.0], dtype=complex)
    ts = np.linspace(0.0, 30.0, 61)
    z = Y.semigroup_time_independent(a, v, ref_bath, 0.1, z0, ts)
    norms = np.linalg.norm(z, axis=1)
    assert np.all(np.diff(norms) <= 1e-12)


def test_semigroup_rejects_uncoupled_level(ref_bath):
    a = np.diag([-1.0, 2.0])   # negative frequency: outside the bath support
    with pytest.raises(WellCouplednessError):
        Y.semigroup_time_independent(a, np.array([1.0, 1.0]), ref_bath, 0.05,
                                     np.array([1.0, 0.0]), 1.0)
