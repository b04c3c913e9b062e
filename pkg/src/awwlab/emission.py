"""Observable averages of the emitted excitation and their limit laws.

The emitted density in frequency is |f_t(omega)|^2; averages of a test
weight B are mode sums on the quadrature grid. Two closed-form limits
cover fast decay (the density freezes at the initial transition line) and
order-one decay (the line sweeps while depleting).
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.integrate import simpson

from . import bath as bath_mod
from .asymptotics import AsymptoticTables, tables_for
from .atom import AtomPath, EigenFrame
from .errors import WellCouplednessError
from .exact import ModeGrid, Trajectory

__all__ = [
    "observable_average",
    "regime_A_limit",
    "regime_B_limit",
]


def observable_average(traj: Trajectory, grid: ModeGrid,
                       obs: bath_mod.TestObservable):
    """<B>_t = sum_i B(omega_i) |f_t(omega_i)|^2 at every stored sample."""
    if traj.field is None:
        raise ValueError("trajectory carries no field amplitudes")
    b_vals = obs(grid.omegas)
    return np.abs(traj.field) ** 2 @ b_vals


def regime_A_limit(frame: EigenFrame, bath: bath_mod.BathSpec,
                   obs: bath_mod.TestObservable, j: int) -> float:
    """Fast-decay limit ghat_B(alpha_j(0)) / ghat(alpha_j(0))."""
    alpha0 = float(frame.energies_at(frame.times[0])[j])
    denom = float(bath_mod.fourier_hat(bath, alpha0))
    if denom == 0.0:
        raise WellCouplednessError(
            f"level frequency {alpha0:.3f} outside the bath support")
    return float(bath_mod.weighted_hat(bath, obs, alpha0)) / denom


def regime_B_limit(frame: EigenFrame, bath: bath_mod.BathSpec, atom: AtomPath,
                   obs: bath_mod.TestObservable, j: int, r: float, t: float,
                   tables: Optional[AsymptoticTables] = None,
                   n_grid: Optional[int] = None) -> float:
    """Order-one-decay limit.

    sqrt(2 pi) r int_0^t |v_j(s)|^2 e^{-2 r int_0^s beta_j} ghat_B(alpha_j(s)) ds.
    The grid refines with r so the depleting exponential stays resolved.
    """
    if r <= 0.0:
        raise ValueError("r must be positive")
    if t == 0.0:
        return 0.0
    if tables is None:
        tables = tables_for(atom, frame, bath)
    if n_grid is None:
        n_grid = int(min(max(201, 40 * r), 40001)) | 1
    ss = np.linspace(0.0, t, n_grid)
    alphas = np.asarray(tables.alpha_at(ss))[:, j]
    v_j = np.array([np.asarray(atom.coupling(s), dtype=complex)[j] for s in ss])
    decay = np.exp(-2.0 * r * np.asarray(tables.int_beta(ss))[:, j])
    ghat_b = np.asarray(bath_mod.weighted_hat(bath, obs, alphas), dtype=float)
    integrand = np.abs(v_j) ** 2 * decay * ghat_b
    return float(np.sqrt(2.0 * np.pi) * r * simpson(integrand, x=ss))
