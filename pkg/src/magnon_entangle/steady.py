"""Steady states and relaxation spectrum of the two-qubit generator.

Three independent routes to the steady state are provided: the kernel of the
full 16x16 Liouvillian, a 6x6 real solve restricted to the diagonal + rho_23
block, and brute-force RK4 propagation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .environment import RateSet
from .lindblad import I4, Liouvillian, build_liouvillian, unvec, validate_psd, vec

ZERO_REL = 1e-9
DM_TOL = 1e-10


class SteadyStateError(ArithmeticError):
    pass


class DegenerateSteadyStateError(SteadyStateError):
    """The block solve is singular; use :func:`steady_state` instead."""


def _matrix(L) -> np.ndarray:
    return L.matrix if isinstance(L, Liouvillian) else np.asarray(L, dtype=complex)


def _scale(m) -> float:
    return max(1.0, float(np.linalg.norm(m, 2)))


def density_matrix_defects(rho) -> dict:
    rho = np.asarray(rho, dtype=complex)
    herm = linalg.hermiticity_defect(rho)
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return {
        "hermiticity": herm,
        "trace": abs(np.trace(rho) - 1.0),
        "min_eigenvalue": float(evals.min()),
    }


def is_density_matrix(rho, tol: float = DM_TOL) -> bool:
    d = density_matrix_defects(rho)
    return d["hermiticity"] <= tol and d["trace"] <= tol and d["min_eigenvalue"] >= -tol


def check_density_matrix(rho, tol: float = DM_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got {rho.shape}")
    d = density_matrix_defects(rho)
    if not (d["hermiticity"] <= tol and d["trace"] <= tol and d["min_eigenvalue"] >= -tol):
        raise ValueError(f"not a valid density matrix: {d}")
    return rho


@dataclass
class SteadyStateResult:
    state: np.ndarray
    multiplicity: int
    residual: float
    method: str
    physical: bool = True

    @property
    def degenerate(self) -> bool:
        return self.multiplicity > 1


@dataclass
class GapResult:
    gap: float
    zero_count: int
    spectrum: np.ndarray = field(repr=False)
    oscillating_count: int = 0
    eps_zero: float = 0.0

    @property
    def no_decay(self) -> bool:
        return self.gap == 0.0


def _normalize(rho) -> np.ndarray:
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise SteadyStateError("kernel vector has zero trace")
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def steady_state(L, tol: float = linalg.DEFAULT_NULL_TOL) -> SteadyStateResult:
    """Steady state from the kernel of the full Liouvillian.

    With a degenerate kernel, returns the t -> infinity image of the maximally
    mixed state (spectral projection onto the kernel) and reports the
    multiplicity.
    """
    m = _matrix(L)
    scale = _scale(m)
    tdef = float(np.max(np.abs(vec(I4).conj() @ m)))
    if tdef > 1e-12 * scale:
        raise SteadyStateError(f"generator is not trace preserving (defect {tdef:.3e})")
    right = linalg.nullspace(m, tol)
    k = right.shape[1]
    if k == 0:
        raise SteadyStateError("empty kernel")
    if k == 1:
        rho = _normalize(unvec(right[:, 0]))
    else:
        left = linalg.left_nullspace(m, tol)
        if left.shape[1] != k:
            raise SteadyStateError("left and right kernels differ in dimension")
        overlap = left.conj().T @ right
        coeff = linalg.solve(overlap, left.conj().T @ vec(I4 / 4))
        rho = _normalize(unvec(right @ coeff))
    resid = float(np.linalg.norm(m @ vec(rho)))
    physical = L.physical if isinstance(L, Liouvillian) else True
    return SteadyStateResult(rho, k, resid, "nullspace", physical)


# Real coordinates of the block: rho11..rho44, Re rho23, Im rho23.
_BLOCK_BASIS = []
for _k in range(4):
    _e = np.zeros((4, 4), dtype=complex)
    _e[_k, _k] = 1.0
    _BLOCK_BASIS.append(_e)
_BLOCK_BASIS.append(np.array([[0, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 0]], dtype=complex))
_BLOCK_BASIS.append(np.array([[0, 0, 0, 0], [0, 0, 1j, 0], [0, -1j, 0, 0], [0, 0, 0, 0]], dtype=complex))
_OFF_BLOCK = np.ones((4, 4), dtype=bool)
_OFF_BLOCK[np.diag_indices(4)] = False
_OFF_BLOCK[1, 2] = _OFF_BLOCK[2, 1] = False


def block_coordinates(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array([rho[0, 0].real, rho[1, 1].real, rho[2, 2].real, rho[3, 3].real,
                     rho[1, 2].real, rho[1, 2].imag])


def from_block_coordinates(x) -> np.ndarray:
    return sum(c * b for c, b in zip(x, _BLOCK_BASIS))


def block_generator(L) -> np.ndarray:
    """6x6 real matrix of L restricted to the block, in block coordinates."""
    m = _matrix(L)
    cols = []
    for b in _BLOCK_BASIS:
        out = unvec(m @ vec(b))
        if np.max(np.abs(out[_OFF_BLOCK])) > 1e-12 * _scale(m):
            raise SteadyStateError("generator does not preserve the block form")
        cols.append(block_coordinates(out))
    return np.array(cols).T


def steady_state_block(rates: RateSet, Delta: float | None = 1.0) -> SteadyStateResult:
    """Steady state of the block form by a reduced real linear solve.

    One population equation (redundant by trace preservation) is replaced by
    the normalization condition.
    """
    check = validate_psd(rates)
    if not check.physical:
        raise ValueError("block solve requires physical rates")
    L = build_liouvillian(rates, Delta)
    a = block_generator(L)
    a[0] = [1, 1, 1, 1, 0, 0]
    rhs = np.zeros(6)
    rhs[0] = 1.0
    try:
        x = linalg.solve(a, rhs, pivot_tol=1e-10).real
    except linalg.SingularMatrixError as exc:
        raise DegenerateSteadyStateError(f"reduced system is singular: {exc}") from exc
    rho = from_block_coordinates(x)
    resid = float(np.linalg.norm(L.matrix @ vec(rho)))
    return SteadyStateResult(rho, 1, resid, "block", True)


def rk4_step_count(t_final: float, dt: float) -> int:
    return max(1, math.ceil(t_final / dt - 1e-12))


def rk4_step_matrix(m, h: float) -> np.ndarray:
    """One classical RK4 step for a constant linear generator, as a matrix.

    For y' = M y the four stages collapse to the degree-4 Taylor polynomial
    of exp(hM); applying this matrix is the RK4 update, just cheaper.
    """
    hm = h * np.asarray(m)
    eye = np.eye(hm.shape[0], dtype=complex)
    return eye + hm @ (eye + hm @ (eye + hm @ (eye + hm / 4) / 3) / 2)


def _rk4_loop(m, y, h, n):
    step = rk4_step_matrix(m, h)
    for _ in range(n):
        y = step @ y
    return y


def propagate(L, rho0, t_final: float, dt: float | None = None) -> np.ndarray:
    """Classical RK4 for d vec(rho)/dt = L vec(rho).

    ``dt`` defaults to 0.05/|L| and must satisfy dt*|L| <= 0.1; it is shrunk
    slightly so that an integer number of steps lands on ``t_final``.
    """
    m = _matrix(L)
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    norm = float(np.linalg.norm(m, 2))
    if dt is None:
        dt = 0.05 / norm if norm > 0 else max(t_final, 1.0)
    if dt <= 0 or dt * norm > 0.1:
        raise ValueError(f"RK4 stability guard violated: dt*|L| = {dt * norm:.3g} > 0.1")
    y = vec(rho0)
    tr0 = np.trace(unvec(y))
    if t_final == 0:
        return unvec(y)
    n = rk4_step_count(t_final, dt)
    y = _rk4_loop(m, y, t_final / n, n)
    rho = unvec(y)
    drift = abs(np.trace(rho) - tr0)
    if drift > 1e-9:
        raise SteadyStateError(f"trace drifted by {drift:.3e} during propagation")
    return rho


def steady_state_propagation(L, rho0=None, t_final: float | None = None) -> SteadyStateResult:
    """Steady state by long-time propagation (default t = 20/gap from I/4)."""
    m = _matrix(L)
    if rho0 is None:
        rho0 = I4 / 4
    if t_final is None:
        g = spectral_gap(m)
        if g.no_decay:
            raise SteadyStateError("no decaying modes; propagation cannot converge")
        t_final = 20.0 / g.gap
    rho = propagate(m, rho0, t_final)
    rho = 0.5 * (rho + rho.conj().T)
    resid = float(np.linalg.norm(m @ vec(rho)))
    physical = L.physical if isinstance(L, Liouvillian) else True
    return SteadyStateResult(rho, 1, resid, "propagation", physical)


def spectral_gap(L) -> GapResult:
    """Smallest decay rate among modes with Re(lambda) < -eps_zero.

    eps_zero = 1e-9 * max(1, |L|). Eigenvalues with both parts inside eps_zero
    count as steady; purely imaginary ones are tallied separately.
    """
    m = _matrix(L)
    eps = ZERO_REL * _scale(m)
    ev = linalg.general_eig(m)
    re, im = ev.real, ev.imag
    zero = int(np.count_nonzero((np.abs(re) <= eps) & (np.abs(im) <= eps)))
    osc = int(np.count_nonzero((np.abs(re) <= eps) & (np.abs(im) > eps)))
    decaying = -re[re < -eps]
    gap = float(decaying.min()) if decaying.size else 0.0
    return GapResult(gap, zero, ev, osc, eps)
