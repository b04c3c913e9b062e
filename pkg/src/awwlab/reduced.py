"""Reduced atomic dynamics: memory-kernel Volterra equation and effective generator.

Both descriptions act on the d atomic amplitudes alone. The Volterra form
keeps the full memory integral against the bath correlation; the effective
form replaces it by a local non-Hermitian generator built from the half-line
transform of the correlation at the instantaneous level frequencies.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import expm

from . import bath as bath_mod
from .atom import AtomPath, EigenFrame, coupling_in_working_basis
from .errors import IntegratorError, ResolutionError
from .exact import Trajectory

__all__ = [
    "PropagatorTable",
    "atomic_propagator",
    "volterra_solve",
    "EffectiveGenerator",
    "effective_generator",
    "effective_solve",
]

_PHASE_PER_STEP = 0.1      # target rad of fast phase per Magnus step
_GAUSS_OFFSET = np.sqrt(3.0) / 6.0


def _magnus_step(matfun, t, h, scale):
    """One 4th-order Magnus step for U' = scale * M(t) U over [t, t+h]."""
    t1 = t + h * (0.5 - _GAUSS_OFFSET)
    t2 = t + h * (0.5 + _GAUSS_OFFSET)
    b1 = scale * matfun(t1)
    b2 = scale * matfun(t2)
    omega = 0.5 * h * (b1 + b2) + (np.sqrt(3.0) / 12.0) * h * h * (b2 @ b1 - b1 @ b2)
    return expm(omega)


class PropagatorTable:
    """Free atomic propagator U_eps(t, 0) cached on a uniform grid.

    Grid values come from accumulated Magnus steps with the fast phase per
    step held at _PHASE_PER_STEP; off-grid queries take one extra substep
    from the nearest lower node so every returned matrix is a product of
    exact exponentials and stays unitary.
    """

    def __init__(self, atom: AtomPath, eps: float, t_end: float,
                 step: Optional[float] = None):
        if step is None:
            a_norm = max(np.linalg.norm(atom.matrix(t), 2)
                         for t in np.linspace(0.0, t_end, 33))
            step = _PHASE_PER_STEP * eps / max(a_norm, 1e-12)
        n = max(int(np.ceil(t_end / step)), 2)
        self.times = np.linspace(0.0, t_end, n + 1)
        self.eps = eps
        self.atom = atom
        h = self.times[1] - self.times[0]
        u = np.empty((n + 1, atom.dim, atom.dim), dtype=complex)
        u[0] = np.eye(atom.dim)
        scale = -1j / eps
        for k in range(n):
            u[k + 1] = _magnus_step(atom.matrix, self.times[k], h, scale) @ u[k]
        self.table = u
        defect = np.abs(u[-1] @ u[-1].conj().T - np.eye(atom.dim)).max()
        if defect > 1e-8:
            raise IntegratorError(f"propagator unitarity drift {defect:.2e}")

    def at(self, t: float) -> np.ndarray:
        k = int(np.searchsorted(self.times, t + 1e-14) - 1)
        k = min(max(k, 0), len(self.times) - 1)
        t0 = self.times[k]
        if abs(t - t0) < 1e-13:
            return self.table[k]
        return _magnus_step(self.atom.matrix, t0, t - t0, -1j / self.eps) @ self.table[k]


def atomic_propagator(atom: AtomPath, eps: float, t: float, s: float = 0.0,
                      table: Optional[PropagatorTable] = None) -> np.ndarray:
    """U_eps(t, s): solution of i eps dU/dt = A(t) U with U(s, s) = 1."""
    if s > t:
        raise ValueError("require s <= t")
    if table is None:
        table = PropagatorTable(atom, eps, t)
    return table.at(t) @ table.at(s).conj().T


def volterra_solve(atom: AtomPath, frame: EigenFrame, bath: bath_mod.BathSpec,
                   eps: float, lam: float, z0: np.ndarray, t_end: float = 1.0,
                   x_step: Optional[float] = None, kernel_floor: float = 1e-12) -> Trajectory:
    """Memory-kernel dynamics of the atomic amplitudes alone.

    In the interaction picture y = U_eps^{-1} z the equation is
    dy/dt = -(lam/eps)^2 beta(t) int_0^t <beta(s), y(s)> gamma((t-s)/eps) ds
    with beta(t) = U_eps(t)^{-1} u(t). Heun stepping with product-trapezoid
    history on a grid whose x = (t-s)/eps spacing is fixed across eps.
    """
    z0 = np.asarray(z0, dtype=complex)
    d = atom.dim
    if x_step is None:
        # second-order history quadrature: shrinking the x-grid with eps makes
        # the discretization error fall alongside the model remainder
        x_step = min(1.0 / 20, eps / 2.0)
    h = x_step * eps
    n = int(np.ceil(t_end / h))
    ts = np.linspace(0.0, t_end, n + 1)
    h = ts[1] - ts[0]

    prop = PropagatorTable(atom, eps, t_end)
    # beta on the solution grid plus midpoint-free Heun nodes
    beta = np.empty((n + 1, d), dtype=complex)
    u_all = np.empty((n + 1, d, d), dtype=complex)
    for k, t in enumerate(ts):
        u_all[k] = prop.at(t)
        beta[k] = u_all[k].conj().T @ coupling_in_working_basis(atom, frame, t)

    a_norm = max(np.linalg.norm(atom.matrix(t), 2) for t in ts[:: max(n // 32, 1)])
    if a_norm * h / eps > 0.5:
        raise ResolutionError(
            f"history grid too coarse: phase {a_norm * h / eps:.2f} rad per node")

    kernel = bath_mod.correlation(bath, ts / eps)   # gamma(x) at x = k*h/eps
    live = np.abs(kernel) >= kernel_floor           # kernel cutoff window
    rate = (lam / eps) ** 2

    y = np.empty((n + 1, d), dtype=complex)
    y[0] = z0
    inner = np.empty(n + 1, dtype=complex)          # <beta(s_k), y(s_k)>
    inner[0] = np.vdot(beta[0], z0)

    def memory(k, extra=None):
        # trapezoid of inner[j] * gamma((t_k - s_j)/eps) over j = 0..k
        if k == 0:
            return 0.0
        vals = inner[:k] * kernel[k:0:-1]
        last = (inner[k] if extra is None else extra) * kernel[0]
        mask = live[k:0:-1]
        s = vals[mask].sum() + 0.5 * last - (0.5 * vals[0] if mask[0] else 0.0)
        return h * s

    for k in range(n):
        f_k = -rate * beta[k] * memory(k)
        y_pred = y[k] + h * f_k
        inner_pred = np.vdot(beta[k + 1], y_pred)
        f_next = -rate * beta[k + 1] * memory(k + 1, extra=inner_pred)
        y[k + 1] = y[k] + 0.5 * h * (f_k + f_next)
        inner[k + 1] = np.vdot(beta[k + 1], y[k + 1])

    z = np.einsum("kij,kj->ki", u_all, y)
    return Trajectory(times=ts, z=z,
                      meta={"eps": eps, "lam": lam, "scheme": "volterra-heun",
                            "x_step": x_step})


class EffectiveGenerator:
    """t -> G_{eps,lam}(t) = A(t) - i lam^2 |u(t)><u(t)| Gamma_eps(t).

    Gamma_eps(t) = sum_j I(t/eps, alpha_j(t)) P_j(t) where I is the finite
    half-line transform of the bath correlation. The transforms are
    precomputed per level on a grid and spline-interpolated; everything
    else is evaluated spectrally at call time.
    """

    def __init__(self, atom: AtomPath, frame: EigenFrame, bath: bath_mod.BathSpec,
                 eps: float, lam: float, t_end: float = 1.0, n_grid: int = 121):
        self.atom, self.frame, self.bath = atom, frame, bath
        self.eps, self.lam = eps, lam
        ts = np.linspace(0.0, t_end, n_grid)
        d = atom.dim
        vals = np.empty((n_grid, d), dtype=complex)
        for k, t in enumerate(ts):
            alphas = frame.energies_at(t)
            for j in range(d):
                vals[k, j] = (0.0 if t == 0.0 else
                              bath_mod.half_line_transform(bath, float(alphas[j]), t / eps))
        self._transforms = CubicSpline(ts, vals, axis=0)
        self.gamma_l1 = bath_mod.correlation_l1_norm(bath)

    def gamma_op(self, t: float) -> np.ndarray:
        """Gamma_eps(t); norm bounded by the L1 norm of the correlation."""
        vecs = self.frame.vectors_at(t)
        i_vals = self._transforms(t)
        out = (vecs * i_vals[None, :]) @ vecs.conj().T
        return out

    def __call__(self, t: float) -> np.ndarray:
        a = self.atom.matrix(t)
        if self.lam == 0.0:
            return a
        u = coupling_in_working_basis(self.atom, self.frame, t)
        return a - 1j * self.lam**2 * np.outer(u, u.conj() @ self.gamma_op(t))


def effective_generator(atom: AtomPath, frame: EigenFrame, bath: bath_mod.BathSpec,
                        eps: float, lam: float, t: float) -> np.ndarray:
    """Single evaluation of G_{eps,lam}(t) without grid caching."""
    a = atom.matrix(t)
    if lam == 0.0 or t == 0.0:
        return a
    u = coupling_in_working_basis(atom, frame, t)
    alphas = frame.energies_at(t)
    vecs = frame.vectors_at(t)
    i_vals = np.array([bath_mod.half_line_transform(bath, float(al), t / eps)
                       for al in alphas])
    gamma_op = (vecs * i_vals[None, :]) @ vecs.conj().T
    return a - 1j * lam**2 * np.outer(u, u.conj() @ gamma_op)


def effective_solve(atom: AtomPath, frame: EigenFrame, bath: bath_mod.BathSpec,
                    eps: float, lam: float, z0: np.ndarray, t_end: float = 1.0,
                    dt_out: float = 1.0 / 200,
                    gen: Optional[EffectiveGenerator] = None) -> Trajectory:
    """Integrate i eps dz/dt = G_{eps,lam}(t) z by stepped Magnus exponentials."""
    z0 = np.asarray(z0, dtype=complex)
    if gen is None:
        gen = EffectiveGenerator(atom, frame, bath, eps, lam, t_end)
    a_norm = max(np.linalg.norm(atom.matrix(t), 2)
                 for t in np.linspace(0.0, t_end, 33))
    h_target = _PHASE_PER_STEP * eps / max(a_norm, 1e-12)

    n_out = int(round(t_end / dt_out)) + 1
    t_out = np.linspace(0.0, t_end, n_out)
    sub = max(int(np.ceil((t_out[1] - t_out[0]) / h_target)), 1)
    scale = -1j / eps

    z = np.empty((n_out, atom.dim), dtype=complex)
    z[0] = z0
    cur = z0.copy()
    for k in range(n_out - 1):
        h = (t_out[k + 1] - t_out[k]) / sub
        for m in range(sub):
            cur = _magnus_step(gen, t_out[k] + m * h, h, scale) @ cur
        z[k + 1] = cur
    return Trajectory(times=t_out, z=z,
                      meta={"eps": eps, "lam": lam, "scheme": "effective-magnus"})
