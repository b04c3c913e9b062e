"""Closed-form leading-order descriptions of the slow-atom dynamics.

Everything here evaluates formulas rather than integrating equations of
motion: per-level phases with second-order corrections, exponential
population decay, the de-excitation regime taxonomy, and the long-time
semigroup of the autonomous model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from . import bath as bath_mod
from .atom import AtomPath, EigenFrame, berry_phase
from .errors import WellCouplednessError

__all__ = [
    "AsymptoticTables",
    "tables_for",
    "leading_order_z",
    "population_approx",
    "RegimeReport",
    "regime_classify",
    "semigroup_time_independent",
]


class AsymptoticTables:
    """Cumulative per-level integrals of frequency, decay rate and shift.

    Everything is precomputed once on a grid covering the frame interval
    and spline-interpolated; repeated sup-norm comparisons then cost one
    spline evaluation per sample.
    """

    def __init__(self, atom: AtomPath, frame: EigenFrame,
                 bath: bath_mod.BathSpec, n_grid: int = 201):
        t0, t1 = float(frame.times[0]), float(frame.times[-1])
        ts = np.linspace(t0, t1, n_grid)
        d = atom.dim
        alpha = np.empty((n_grid, d))
        beta = np.empty((n_grid, d))
        shift = np.empty((n_grid, d))
        for k, t in enumerate(ts):
            alpha[k] = frame.energies_at(t)
            v = np.asarray(atom.coupling(t), dtype=complex)
            for j in range(d):
                beta[k, j], shift[k, j] = bath_mod.decay_and_shift(
                    bath, v[j], float(alpha[k, j]))
        self.atom, self.frame, self.bath = atom, frame, bath
        self.times = ts
        self.alpha, self.beta, self.shift = alpha, beta, shift
        self._cum_alpha = CubicSpline(
            ts, cumulative_simpson(alpha, x=ts, axis=0, initial=0.0), axis=0)
        self._cum_beta = CubicSpline(
            ts, cumulative_simpson(beta, x=ts, axis=0, initial=0.0), axis=0)
        self._cum_shift = CubicSpline(
            ts, cumulative_simpson(shift, x=ts, axis=0, initial=0.0), axis=0)
        self._beta_spline = CubicSpline(ts, beta, axis=0)
        self._alpha_spline = CubicSpline(ts, alpha, axis=0)

    def int_alpha(self, t):
        return self._cum_alpha(t)

    def int_beta(self, t):
        return self._cum_beta(t)

    def int_shift(self, t):
        return self._cum_shift(t)

    def beta_at(self, t):
        return self._beta_spline(t)

    def alpha_at(self, t):
        return self._alpha_spline(t)


def tables_for(atom: AtomPath, frame: EigenFrame,
               bath: bath_mod.BathSpec) -> AsymptoticTables:
    """Cached AsymptoticTables attached to the frame."""
    cached = getattr(frame, "_asym_tables", None)
    if cached is None or cached.bath is not bath:
        cached = AsymptoticTables(atom, frame, bath)
        frame._asym_tables = cached
    return cached


def leading_order_z(frame: EigenFrame, bath: bath_mod.BathSpec, atom: AtomPath,
                    eps: float, lam: float, z0: np.ndarray, t,
                    tables: Optional[AsymptoticTables] = None) -> np.ndarray:
    """Leading-order atomic amplitudes.

    Per level: dynamical phase with the Lamb-shift correction, exponential
    decay at rate beta_j/eps, and the geometric phase, all riding on the
    instantaneous eigenvector.
    """
    if tables is None:
        tables = tables_for(atom, frame, bath)
    z0 = np.asarray(z0, dtype=complex)
    d = atom.dim
    v0 = frame.vectors_at(frame.times[0])
    z0_levels = v0.conj().T @ z0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((len(t_arr), d), dtype=complex)
    for k, tk in enumerate(t_arr):
        phase = tables.int_alpha(tk) + lam**2 * tables.int_shift(tk)
        decay = tables.int_beta(tk)
        xi = np.array([berry_phase(frame, j, tk) for j in range(d)])
        amps = (np.exp(-1j * phase / eps)
                * np.exp(-(lam**2 / eps) * decay)
                * np.exp(1j * xi) * z0_levels)
        out[k] = frame.vectors_at(tk) @ amps
    return out if np.ndim(t) > 0 else out[0]


def population_approx(frame: EigenFrame, bath: bath_mod.BathSpec, eps: float,
                      lam: float, p0: float, j: int, t,
                      atom: Optional[AtomPath] = None,
                      tables: Optional[AsymptoticTables] = None):
    """p_j(t) = exp(-2 (lam^2/eps) int_0^t beta_j) p_j(0)."""
    if tables is None:
        if atom is None:
            raise ValueError("need either tables or the atom path")
        tables = tables_for(atom, frame, bath)
    decay = np.asarray(tables.int_beta(t))[..., j]
    return np.exp(-2.0 * (lam**2 / eps) * decay) * p0


@dataclass
class RegimeReport:
    regime: str          # strong | davies | weak_a | weak_b
    ratio: float         # r = lam^2 / eps
    p_down: Optional[float]   # predicted de-excitation at t (when tables given)
    thresholds: tuple = (10.0, 0.1)   # artifact conventions, not asymptotic facts


def regime_classify(eps: float, lam: float,
                    tables: Optional[AsymptoticTables] = None,
                    z0: Optional[np.ndarray] = None, t: float = 1.0) -> RegimeReport:
    """Coupling-vs-slowness taxonomy with an evaluated de-excitation prediction.

    The ratio r = lam^2/eps orders the regimes; the prediction
    1 - sum_j exp(-2 r int beta_j)|z0_j|^2 interpolates all of them
    (saturating near 1 when strong, vanishing when weak).
    """
    if not (0.0 < eps <= 1.0 and 0.0 < lam <= 1.0):
        raise ValueError("eps and lam must lie in (0, 1]")
    r = lam**2 / eps
    if r >= 10.0:
        regime = "strong"
    elif r >= 0.1:
        regime = "davies"
    else:
        regime = "weak_a" if lam**2 / eps**2 >= 1.0 else "weak_b"
    p_down = None
    if tables is not None:
        d = tables.atom.dim
        if z0 is None:
            weights = np.zeros(d)
            weights[0] = 1.0
        else:
            v0 = tables.frame.vectors_at(tables.frame.times[0])
            weights = np.abs(v0.conj().T @ np.asarray(z0, dtype=complex)) ** 2
        survive = np.exp(-2.0 * r * np.asarray(tables.int_beta(t)))
        p_down = float(1.0 - np.dot(survive, weights))
    return RegimeReport(regime=regime, ratio=r, p_down=p_down)


def semigroup_time_independent(a: np.ndarray, v: np.ndarray,
                               bath: bath_mod.BathSpec, lam: float,
                               z0: np.ndarray, t) -> np.ndarray:
    """Autonomous long-time law z(t) = sum_j e^{-i t (alpha_j + lam^2 a'_j)} P_j z0.

    a'_j = shift_j - i beta_j with the coupling component <phi_j, v>.
    Physical time t; no slow rescaling enters.
    """
    a = np.asarray(a, dtype=complex)
    v = np.asarray(v, dtype=complex)
    z0 = np.asarray(z0, dtype=complex)
    energies, vecs = np.linalg.eigh(a)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    corr = np.empty(len(energies), dtype=complex)
    for j, al in enumerate(energies):
        v_j = np.vdot(vecs[:, j], v)
        beta_j, shift_j = bath_mod.decay_and_shift(bath, v_j, float(al))
        if beta_j <= 0.0:
            raise WellCouplednessError(
                f"level frequency {al:.3f} outside the bath support")
        corr[j] = shift_j - 1j * beta_j
    comps = vecs.conj().T @ z0
    phases = np.exp(-1j * np.outer(t_arr, energies + lam**2 * corr))
    out = np.einsum("kj,ij->ki", phases * comps[None, :], vecs)
    return out if np.ndim(t) > 0 else out[0]
