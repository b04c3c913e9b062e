"""Time-dependent atomic Hamiltonian, smooth eigenframe, and geometric transport.

The working basis is the eigenbasis of A(0); the coupling amplitudes v_j(t)
are given relative to the instantaneous eigenvectors, and w(t) collects the
same interaction re-expressed over the frozen t=0 eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh, expm

from . import bath as bath_mod
from .errors import FrameSmoothnessError, GapViolation

__all__ = [
    "AtomPath",
    "EigenFrame",
    "eigenframe",
    "w_vector",
    "coupling_in_working_basis",
    "berry_phase",
    "kato_intertwiner",
    "validate_coupling",
    "CouplingReport",
    "diag_rotation_atom",
    "complex_phase_atom",
    "tabulated_atom",
]

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class AtomPath:
    """d-level Hamiltonian path A(t) with coupling amplitudes v(t).

    hamiltonian(t) -> (d, d) Hermitian complex matrix
    coupling(t)    -> (d,) complex amplitudes relative to the moving eigenbasis
    eigvec_provider, when given, fixes the eigenframe gauge analytically:
    it returns (energies ascending, eigenvector columns) at time t.
    """

    dim: int
    hamiltonian: Callable[[float], np.ndarray]
    coupling: Callable[[float], np.ndarray]
    eigvec_provider: Optional[Callable[[float], tuple]] = None
    label: str = "custom"

    def matrix(self, t: float) -> np.ndarray:
        a = np.asarray(self.hamiltonian(t), dtype=complex)
        if a.shape != (self.dim, self.dim):
            raise ValueError(f"A({t}) has shape {a.shape}, expected {(self.dim, self.dim)}")
        if np.max(np.abs(a - a.conj().T)) > HERMITICITY_TOL * max(1.0, np.max(np.abs(a))):
            raise ValueError(f"A({t}) is not Hermitian to tolerance")
        return a


@dataclass
class EigenFrame:
    """Smoothly tracked eigendecomposition of A(t) on a time grid."""

    atom: AtomPath
    times: np.ndarray          # (n,)
    energies: np.ndarray       # (n, d) ascending in j
    vectors: np.ndarray        # (n, d, d), column j = phi_j(t_k)
    gap: float
    _vec_spline: object = field(default=None, repr=False)
    _energy_spline: object = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.atom.dim

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def index_of(self, t: float) -> int:
        k = int(round((t - self.times[0]) / self.step))
        if not 0 <= k < len(self.times):
            raise ValueError(f"t={t} outside frame range")
        if abs(self.times[k] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not a frame grid point")
        return k

    def _splines(self):
        if self._vec_spline is None:
            self._vec_spline = CubicSpline(self.times, self.vectors, axis=0)
            self._energy_spline = CubicSpline(self.times, self.energies, axis=0)
        return self._vec_spline, self._energy_spline

    def energies_at(self, t):
        _, es = self._splines()
        return es(t)

    def vectors_at(self, t):
        """Eigenvector columns at arbitrary t in the tracked gauge.

        Spline interpolation followed by re-orthonormalization against the
        exact instantaneous eigenspaces keeps orthonormality at grid accuracy.
        """
        vs, _ = self._splines()
        return vs(t)

    def projections(self, k: int) -> np.ndarray:
        """(d, d, d) stack of rank-one spectral projections at grid index k."""
        v = self.vectors[k]
        return np.einsum("ij,kj->jik", v, v.conj())


def eigenframe(atom: AtomPath, times: np.ndarray, gap_min: float = 1e-8) -> EigenFrame:
    """Track a smooth eigenframe of A(t) over the grid.

    Without an analytic provider, successive eigenvectors are phase-aligned so
    the overlap with the previous grid point is real and positive.
    """
    times = np.asarray(times, dtype=float)
    n, d = len(times), atom.dim
    energies = np.empty((n, d))
    vectors = np.empty((n, d, d), dtype=complex)
    gap = np.inf
    for k, t in enumerate(times):
        if atom.eigvec_provider is not None:
            a, v = atom.eigvec_provider(t)
            a = np.asarray(a, float)
            v = np.asarray(v, complex)
            ortho = np.max(np.abs(v.conj().T @ v - np.eye(d)))
            if ortho > 1e-10:
                raise FrameSmoothnessError(
                    f"provided eigenvectors not orthonormal at t={t} (defect {ortho:.1e})")
        else:
            a, v = eigh(atom.matrix(t))
            if k > 0:
                for j in range(d):
                    ov = np.vdot(vectors[k - 1, :, j], v[:, j])
                    if abs(ov) > 0:
                        v[:, j] *= np.conj(ov) / abs(ov)
        if np.any(np.diff(a) < gap_min) or a[0] <= 0.0:
            raise GapViolation(
                f"eigenvalue gap/positivity violated at t={t}", time=float(t))
        if d > 1:
            gap = min(gap, float(np.min(np.diff(a))))
        if k > 0:
            bad = np.real(np.einsum("ij,ij->j", vectors[k - 1].conj(), v)) <= 0.0
            if np.any(bad):
                raise FrameSmoothnessError(
                    f"eigenvector phase flip at t={t}, levels {np.nonzero(bad)[0]}")
        energies[k], vectors[k] = a, v
    return EigenFrame(atom=atom, times=times, energies=energies, vectors=vectors, gap=gap)


def w_vector(atom: AtomPath, frame: EigenFrame, t: float) -> np.ndarray:
    """Components of the coupling over the frozen t=0 eigenvectors.

    w_j(t) = sum_l v_l(t) <phi_j(0), phi_l(t)>.
    """
    v0 = frame.vectors[0]
    vt = frame.vectors_at(t)
    overlap = v0.conj().T @ vt
    return overlap @ np.asarray(atom.coupling(t), dtype=complex)


def coupling_in_working_basis(atom: AtomPath, frame: EigenFrame, t: float) -> np.ndarray:
    """The interaction vector sum_l v_l(t) phi_l(t) in the working basis."""
    vt = frame.vectors_at(t)
    return vt @ np.asarray(atom.coupling(t), dtype=complex)


def _berry_table(frame: EigenFrame) -> np.ndarray:
    """(n, d) cumulative geometric phases xi_j(t_k) along the tracked gauge."""
    v = frame.vectors
    h = frame.step
    dv = np.gradient(v, h, axis=0, edge_order=2)
    # fourth-order central stencil in the interior; the second-order edge
    # values enter the phase integral only with O(h) weight
    dv[2:-2] = (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)
    conn = np.einsum("kij,kij->kj", v.conj(), dv)  # <phi_j | dphi_j>
    # <phi|dphi> is purely imaginary for a normalized path; the real residue
    # measures frame roughness.
    residue = np.max(np.abs(conn.real))
    if residue > 1e-4:
        raise FrameSmoothnessError(
            f"Berry connection has real residue {residue:.1e}; refine the grid")
    xi = cumulative_trapezoid(1j * conn, dx=h, axis=0, initial=0.0)
    imag_residue = np.max(np.abs(xi.imag))
    if imag_residue > 1e-8:
        raise FrameSmoothnessError(
            f"Berry phase accumulated imaginary part {imag_residue:.1e}")
    return xi.real


def berry_phase(frame: EigenFrame, j: int, t: float) -> float:
    """xi_j(t) = i int_0^t <phi_j(u), d/du phi_j(u)> du in the frame gauge."""
    if getattr(frame, "_berry", None) is None:
        frame._berry = _berry_table(frame)
    xi = frame._berry
    return float(np.interp(t, frame.times, xi[:, j]))


def _kato_generator_spline(frame: EigenFrame):
    """Spline of K(t) = sum_j [d/dt P_j(t)] P_j(t), anti-hermitized."""
    n, d = len(frame.times), frame.dim
    proj = np.empty((n, d, d, d), dtype=complex)
    for k in range(n):
        proj[k] = frame.projections(k)
    spline = CubicSpline(frame.times, proj, axis=0)
    dspline = spline.derivative()

    def kato(t):
        p = spline(t)
        dp = dspline(t)
        k_mat = np.einsum("jab,jbc->ac", dp, p)
        return 0.5 * (k_mat - k_mat.conj().T)

    return kato


def kato_intertwiner(frame: EigenFrame, t: float, s: float = 0.0,
                     unitarity_tol: float = 1e-8) -> np.ndarray:
    """Transport W(t,s) solving dW/dt = K(t) W, W(s,s) = 1.

    Fourth-order two-point Magnus steps on the frame grid; the anti-Hermitian
    generator makes every step exactly unitary.
    """
    if t < s:
        return kato_intertwiner(frame, s, t).conj().T
    if getattr(frame, "_kato", None) is None:
        frame._kato = _kato_generator_spline(frame)
    kato = frame._kato
    d = frame.dim
    w = np.eye(d, dtype=complex)
    if t == s:
        return w
    h = frame.step
    n_steps = max(1, int(np.ceil((t - s) / h)))
    grid = np.linspace(s, t, n_steps + 1)
    c1, c2 = 0.5 - np.sqrt(3.0) / 6.0, 0.5 + np.sqrt(3.0) / 6.0
    for a, b in zip(grid[:-1], grid[1:]):
        hh = b - a
        k1 = kato(a + c1 * hh)
        k2 = kato(a + c2 * hh)
        omega = 0.5 * hh * (k1 + k2) + (np.sqrt(3.0) / 12.0) * hh * hh * (k2 @ k1 - k1 @ k2)
        w = expm(omega) @ w
    defect = np.max(np.abs(w.conj().T @ w - np.eye(d)))
    if defect > unitarity_tol:
        raise FrameSmoothnessError(
            f"Kato transport lost unitarity (defect {defect:.1e}); refine the grid")
    return w


@dataclass(frozen=True)
class CouplingReport:
    smallness_value: float          # 4 lambda^2 ||v||^2 ||gamma||_L1 / gap
    smallness_ok: bool
    beta_min: np.ndarray            # per level inf_t beta_j(t)
    well_coupled: np.ndarray        # per level bool
    flagged_levels: tuple

    @property
    def ok(self) -> bool:
        return self.smallness_ok and bool(np.all(self.well_coupled))


def validate_coupling(atom: AtomPath, frame: EigenFrame, bath: "bath_mod.BathSpec",
                      lam: float, n_check: int = 64) -> CouplingReport:
    """Check the coupling-smallness condition and per-level well-coupledness."""
    ts = np.linspace(frame.times[0], frame.times[-1], n_check)
    vnorm2 = max(
        float(np.sum(np.abs(np.asarray(atom.coupling(t))) ** 2)) for t in ts
    )
    g_l1 = bath_mod.correlation_l1_norm(bath)
    value = 4.0 * lam**2 * vnorm2 * g_l1 / frame.gap
    d = atom.dim
    beta_min = np.full(d, np.inf)
    for t in ts:
        v = np.asarray(atom.coupling(t))
        alphas = frame.energies_at(t)
        for j in range(d):
            beta_j, _ = bath_mod.decay_and_shift(bath, v[j], alphas[j])
            beta_min[j] = min(beta_min[j], beta_j)
    well = beta_min > 0.0
    return CouplingReport(
        smallness_value=float(value),
        smallness_ok=bool(value < 1.0),
        beta_min=beta_min,
        well_coupled=well,
        flagged_levels=tuple(int(j) for j in np.nonzero(~well)[0]),
    )


# ---------------------------------------------------------------------------
# builtin atom families
# ---------------------------------------------------------------------------

def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def diag_rotation_atom(level_funcs, theta_func, coupling_func, label="diag+rotation") -> AtomPath:
    """A(t) = R(theta(t)) diag(alpha_1(t), ..., alpha_d(t)) R(theta(t))^T, d = 2."""
    d = len(level_funcs)
    if d != 2:
        raise ValueError("the rotation family is two-level")

    def ham(t):
        r = _rotation(theta_func(t))
        return r @ np.diag([f(t) for f in level_funcs]) @ r.T

    def coup(t):
        return np.asarray(coupling_func(t), dtype=complex)

    return AtomPath(dim=d, hamiltonian=ham, coupling=coup, label=label)


def complex_phase_atom(theta0: float, omega: float, levels=(1.0, 2.0)) -> AtomPath:
    """Two-level path with constant spectrum and a complex eigenvector phase.

    phi_1(t) = (cos theta0, e^{i omega t} sin theta0): the tracked gauge
    accumulates the geometric phase -omega t sin^2(theta0).
    """
    lo, hi = levels

    def provider(t):
        c, s = np.cos(theta0), np.sin(theta0)
        ph = np.exp(1j * omega * t)
        v1 = np.array([c, ph * s])
        v2 = np.array([-np.conj(ph) * s, c])
        return np.array([lo, hi]), np.column_stack([v1, v2])

    def ham(t):
        a, v = provider(t)
        return (v * a) @ v.conj().T

    return AtomPath(
        dim=2,
        hamiltonian=ham,
        coupling=lambda t: np.array([1.0, 1.0], dtype=complex),
        eigvec_provider=provider,
        label="complex-phase",
    )


def tabulated_atom(path) -> AtomPath:
    """Atom path from CSV: column t, then d^2 (re, im) matrix entries row-major,
    then d (re, im) coupling entries; cubic-spline interpolated."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    ts = data[:, 0]
    n_rest = data.shape[1] - 1
    # 2 d^2 + 2 d = n_rest
    d = int(round((-1 + np.sqrt(1 + 2 * n_rest)) / 2))
    if 2 * d * d + 2 * d != n_rest:
        raise ValueError("column count does not match any square dimension")
    mats = (data[:, 1:1 + 2 * d * d:2] + 1j * data[:, 2:2 + 2 * d * d:2]).reshape(-1, d, d)
    coups = data[:, 1 + 2 * d * d::2] + 1j * data[:, 2 + 2 * d * d::2]
    m_spline = CubicSpline(ts, mats, axis=0)
    c_spline = CubicSpline(ts, coups, axis=0)

    def ham(t):
        a = m_spline(t)
        return 0.5 * (a + a.conj().T)  # symmetrize interpolation noise

    return AtomPath(dim=d, hamiltonian=ham, coupling=lambda t: c_spline(t), label="tabulated")
