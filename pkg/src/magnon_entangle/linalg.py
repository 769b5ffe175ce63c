"""Small dense complex linear algebra (dimension <= 16).

Eigen-decompositions and the SVD are delegated to LAPACK through numpy; this
module adds the input guards, residual checks and error reporting that the
rest of the package relies on. The linear solver is a plain Gaussian
elimination with partial pivoting so that a near-singular pivot can be
reported instead of silently amplified.
"""

from __future__ import annotations

import numpy as np

MAX_DIM = 16
DEFAULT_NULL_TOL = 1e-9


class LinAlgError(ArithmeticError):
    """Raised when a kernel routine cannot meet its contract."""


class NotHermitianError(LinAlgError, ValueError):
    pass


class SingularMatrixError(LinAlgError):
    pass


class ConvergenceError(LinAlgError):
    """Eigensolver failure; ``partial`` holds whatever was obtained."""

    def __init__(self, msg, partial=None, residual=None):
        super().__init__(msg)
        self.partial = partial
        self.residual = residual


def as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    return a


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_defect(a) -> float:
    """max |A - A^dagger|."""
    a = np.asarray(a, dtype=complex)
    return max_abs(a - a.conj().T)


def hermitian_eig(a, guard: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Raises NotHermitianError when ``max|A - A^dagger| > guard * max|A|`` and
    ConvergenceError when the reconstruction residual exceeds
    ``1e-10 * max(1, max|A|)``.
    """
    a = as_square(a)
    scale = max_abs(a)
    defect = hermiticity_defect(a)
    if defect > guard * scale:
        raise NotHermitianError(f"matrix is not Hermitian (defect {defect:.3e})")
    h = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    resid = max_abs(h - (v * w) @ v.conj().T)
    if resid > 1e-10 * max(1.0, scale):
        raise ConvergenceError("Hermitian eigensolver residual too large",
                               partial=(w, v), residual=resid)
    return w, v


def general_eig(a) -> np.ndarray:
    """Eigenvalues of a general complex square matrix (multiset, unordered)."""
    a = as_square(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc), partial=None) from exc


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)


def nullspace(a, tol: float = DEFAULT_NULL_TOL) -> np.ndarray:
    """Orthonormal kernel basis, returned as the columns of an (n, k) array.

    A right singular vector belongs to the kernel when its singular value is
    at most ``tol`` times the largest one (or ``tol`` outright for the zero
    matrix).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = as_square(a)
    n = a.shape[0]
    _, s, vh = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    cut = tol * smax if smax > 0 else tol
    rank = int(np.count_nonzero(s > cut))
    return vh[rank:].conj().T.reshape(n, n - rank)


def left_nullspace(a, tol: float = DEFAULT_NULL_TOL) -> np.ndarray:
    """Columns w with w^dagger A = 0."""
    return nullspace(np.asarray(a, dtype=complex).conj().T, tol)


def solve(a, b, pivot_tol: float = 1e-13) -> np.ndarray:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    A pivot smaller than ``pivot_tol * max|A|`` raises SingularMatrixError.
    ``b`` may be a vector or a matrix of right-hand sides.
    """
    a = as_square(a)
    n = a.shape[0]
    bb = np.asarray(b, dtype=complex)
    vec = bb.ndim == 1
    if bb.shape[0] != n:
        raise ValueError("right-hand side has the wrong length")
    m = a.copy()
    x = bb.reshape(n, -1).copy()
    floor = pivot_tol * max(max_abs(a), np.finfo(float).tiny)
    for k in range(n):
        p = k + int(np.argmax(np.abs(m[k:, k])))
        if abs(m[p, k]) <= floor:
            raise SingularMatrixError(f"pivot {abs(m[p, k]):.3e} at column {k} is below tolerance")
        if p != k:
            m[[k, p]] = m[[p, k]]
            x[[k, p]] = x[[p, k]]
        f = m[k + 1:, k] / m[k, k]
        m[k + 1:, k:] -= np.outer(f, m[k, k:])
        x[k + 1:] -= np.outer(f, x[k])
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - m[k, k + 1:] @ x[k + 1:]) / m[k, k]
    return x[:, 0] if vec else x
