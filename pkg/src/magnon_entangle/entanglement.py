"""Two-qubit concurrence (Wootters) and the block-state shortcut."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import linalg
from .lindblad import SIGMA_Y
from .steady import _OFF_BLOCK, check_density_matrix

YY = np.kron(SIGMA_Y, SIGMA_Y)
CLAMP = 1e-12
BLOCK_TOL = 1e-9


class ConcurrenceResult(NamedTuple):
    value: float
    lambdas: tuple[float, float, float, float]


def concurrence(rho) -> ConcurrenceResult:
    """Wootters concurrence from the spectrum of rho (Y x Y) rho* (Y x Y)."""
    rho = check_density_matrix(rho)
    r = rho @ YY @ rho.conj() @ YY
    ev = linalg.general_eig(r)
    # R has a real non-negative spectrum; the imaginary residue is roundoff.
    re = ev.real
    if re.min() < -CLAMP:
        raise ValueError(f"spin-flip matrix has a negative eigenvalue {re.min():.3e}")
    lam = np.sort(np.sqrt(np.clip(re, 0.0, None)))[::-1]
    value = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return ConcurrenceResult(min(value, 1.0), tuple(float(x) for x in lam))


def is_block_form(rho, tol: float = BLOCK_TOL) -> bool:
    return float(np.max(np.abs(np.asarray(rho)[_OFF_BLOCK]))) <= tol


def concurrence_block(rho) -> float:
    """2 max(0, |rho_23| - sqrt(rho_11 rho_44)) for states of block form."""
    rho = np.asarray(rho, dtype=complex)
    if not is_block_form(rho):
        raise ValueError("state is not of block form; use concurrence()")
    p = max(rho[0, 0].real * rho[3, 3].real, 0.0)
    return 2.0 * max(0.0, abs(rho[1, 2]) - math.sqrt(p))


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))
