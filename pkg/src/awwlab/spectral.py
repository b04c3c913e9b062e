"""Non-Hermitian spectral machinery for the effective generator.

Eigenvalues of G pick up negative imaginary parts of order lam^2; the
associated rank-one projections are built either from matched left/right
eigenvector pairs or, independently, from resolvent contour integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import bath as bath_mod
from .atom import AtomPath, EigenFrame
from .errors import ContourError, FrameSmoothnessError, MatchingError
from .reduced import EffectiveGenerator, _magnus_step

__all__ = [
    "PerturbedSpectrum",
    "perturbed_spectrum",
    "first_order_correction",
    "riesz_projection",
    "residue_integral",
    "adiabatic_evolution_diagnostic",
]


@dataclass
class PerturbedSpectrum:
    """Eigenvalues and rank-one projections of G, ordered by unperturbed level."""

    eigenvalues: np.ndarray    # (d,) complex, entry j matched to level j
    projections: np.ndarray    # (d, d, d), generally non-orthogonal
    right: np.ndarray          # (d, d) right eigenvectors as columns
    left: np.ndarray           # (d, d) left eigenvectors as columns

    def reconstruct(self) -> np.ndarray:
        """Sum alpha_j P_j; equals G when the spectrum is simple."""
        return np.einsum("j,jkl->kl", self.eigenvalues, self.projections)


def perturbed_spectrum(g: np.ndarray, energies: np.ndarray,
                       vectors: np.ndarray) -> PerturbedSpectrum:
    """Eigendecomposition of G matched to the unperturbed levels.

    energies/vectors are the Hermitian reference spectrum at the same time;
    matching is greedy by eigenvalue distance, with near-ties resolved by
    eigenvector overlap with the reference column.
    """
    d = g.shape[0]
    w, vl, vr = sla.eig(g, left=True, right=True)

    dist = np.abs(w[None, :] - np.asarray(energies)[:, None])   # (level, eig)
    order = np.full(d, -1, dtype=int)
    used = np.zeros(d, dtype=bool)
    for level in np.argsort(dist.min(axis=1)):
        row = dist[level].copy()
        row[used] = np.inf
        best = int(np.argmin(row))
        near = np.flatnonzero(np.abs(row - row[best]) < 1e-12)
        if len(near) > 1:
            overlaps = [abs(np.vdot(vectors[:, level], vr[:, i])) for i in near]
            best = int(near[int(np.argmax(overlaps))])
            if sorted(overlaps)[-1] - sorted(overlaps)[-2] < 1e-12:
                raise MatchingError(
                    f"levels indistinguishable near eigenvalue {w[best]:.6g}")
        order[level] = best
        used[best] = True

    w = w[order]
    vr = vr[:, order]
    vl = vl[:, order]
    projections = np.empty((d, d, d), dtype=complex)
    for j in range(d):
        norm = np.vdot(vl[:, j], vr[:, j])
        projections[j] = np.outer(vr[:, j], vl[:, j].conj()) / norm
    return PerturbedSpectrum(eigenvalues=w, projections=projections,
                             right=vr, left=vl)


def first_order_correction(bath: bath_mod.BathSpec, v_j: complex, alpha_j: float,
                           eps: float, t: float) -> complex:
    """Second-order level correction -i|v_j|^2 int_0^{t/eps} e^{ix alpha} gamma(x) dx.

    Pass t=inf for the limiting value shift - i*decay (the Lamb shift and
    decay rate of the level).
    """
    if t == 0.0:
        return 0.0 + 0.0j
    horizon = np.inf if np.isinf(t) else t / eps
    return -1j * abs(v_j) ** 2 * bath_mod.half_line_transform(bath, alpha_j, horizon)


def _contour(center: complex, radius: float, m: int):
    theta = 2.0 * np.pi * np.arange(m) / m
    return center + radius * np.exp(1j * theta)


def riesz_projection(g: np.ndarray, center: complex, radius: float,
                     m: int = 64, max_doublings: int = 3) -> np.ndarray:
    """-(2 pi i)^{-1} of the resolvent (G - z)^{-1} around the circle.

    Trapezoid on the circle converges spectrally for the analytic resolvent;
    node count doubles if an eigenvalue sits close to the contour.
    """
    d = g.shape[0]
    eye = np.eye(d)
    eigs = np.linalg.eigvals(g)
    if np.min(np.abs(np.abs(eigs - center) - radius)) < 1e-8:
        raise ContourError("an eigenvalue lies within 1e-8 of the contour circle")
    for _ in range(max_doublings + 1):
        zs = _contour(center, radius, m)
        acc = np.zeros((d, d), dtype=complex)
        for z in zs:
            acc += np.linalg.solve(g - z * eye, eye) * (z - center)
        p = -acc / m
        if np.linalg.norm(p @ p - p, 2) < 1e-10:
            return p
        m *= 2
    raise ContourError("contour quadrature failed to produce an idempotent")


def residue_integral(center: complex, radius: float, pole: complex,
                     m: int = 64) -> complex:
    """-(2 pi i)^{-1} contour integral of z/(pole - z)^2 around the circle."""
    zs = _contour(center, radius, m)
    vals = zs / (pole - zs) ** 2 * (zs - center)
    return -np.mean(vals)


def _perturbed_projection_table(gen: EffectiveGenerator, frame: EigenFrame,
                                ts: np.ndarray) -> np.ndarray:
    d = gen.atom.dim
    out = np.empty((len(ts), d, d, d), dtype=complex)
    for k, t in enumerate(ts):
        pspec = perturbed_spectrum(gen(t), frame.energies_at(t), frame.vectors_at(t))
        out[k] = pspec.projections
    return out


def adiabatic_evolution_diagnostic(atom: AtomPath, frame: EigenFrame,
                                   bath: bath_mod.BathSpec, eps: float, lam: float,
                                   t: float, s: float = 0.0, n_grid: int = 401,
                                   gen: EffectiveGenerator = None) -> np.ndarray:
    """Factorized adiabatic evolution V(t, s) = W(t, s) Psi(t, s).

    W transports the perturbed projections (generator sum_j dP_j P_j, with
    dP_j from centered differences checked under step halving); Psi carries
    the dynamical phases with the second-order level corrections. Used as a
    diagnostic against the stepped effective propagator.
    """
    if s > t:
        raise ValueError("require s <= t")
    if gen is None:
        gen = EffectiveGenerator(atom, frame, bath, eps, lam, t_end=max(t, 1e-9))
    d = atom.dim
    if t == s:
        return np.eye(d, dtype=complex)

    ts = np.linspace(s, t, n_grid)
    h = ts[1] - ts[0]
    p_tab = _perturbed_projection_table(gen, frame, ts)
    dp = np.gradient(p_tab, h, axis=0, edge_order=2)

    # step-halving consistency of the finite-difference derivative
    coarse = p_tab[::2]
    dp_c = np.gradient(coarse, 2.0 * h, axis=0, edge_order=2)
    mism = np.max(np.abs(dp_c[1:-1] - dp[2:-2:2]))
    if mism > 50.0 * h:
        raise FrameSmoothnessError(
            f"projection derivative unstable under step halving ({mism:.2e})")

    k_tab = np.einsum("kjab,kjbc->kac", dp, p_tab)
    from scipy.interpolate import CubicSpline
    k_spline = CubicSpline(ts, k_tab, axis=0)

    w = np.eye(d, dtype=complex)
    for k in range(n_grid - 1):
        w = _magnus_step(k_spline, ts[k], h, 1.0) @ w

    # dynamical phases: cumulative Simpson of alpha_j + lam^2 alpha'_j
    exponents = np.empty((n_grid, d), dtype=complex)
    for k, u in enumerate(ts):
        alphas = frame.energies_at(u)
        corr = np.array([
            first_order_correction(bath, frame_v_component(frame, atom, u, j),
                                   float(alphas[j]), eps, u)
            for j in range(d)])
        exponents[k] = alphas + lam**2 * corr
    from scipy.integrate import simpson
    phases = np.array([simpson(exponents[:, j], x=ts) for j in range(d)])
    psi = np.zeros((d, d), dtype=complex)
    for j in range(d):
        psi += np.exp(-1j * phases[j] / eps) * p_tab[0, j]
    return w @ psi


def frame_v_component(frame: EigenFrame, atom: AtomPath, t: float, j: int) -> complex:
    """Coupling amplitude of level j: <phi_j(t), v(t)> in the eigenbasis."""
    return complex(np.asarray(atom.coupling(t), dtype=complex)[j])
