"""Two-qubit Lindblad generator built from a :class:`RateSet`.

Basis order is (|uu>, |ud>, |du>, |dd>) with sigma_z|u> = +|u> and
sigma^+ = |u><d|. Density matrices are vectorized by stacking columns, so
``vec(A X B) = kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .environment import RateSet

PSD_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)

SP = (np.kron(SIGMA_PLUS, I2), np.kron(I2, SIGMA_PLUS))
SM = (np.kron(SIGMA_MINUS, I2), np.kron(I2, SIGMA_MINUS))
SZ = (np.kron(SIGMA_Z, I2), np.kron(I2, SIGMA_Z))


def vec(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = math.isqrt(v.size)
    return v.reshape(n, n, order="F")


def spre(a):
    return np.kron(np.eye(a.shape[0]), a)


def spost(b):
    return np.kron(b.T, np.eye(b.shape[0]))


def sandwich(a, b):
    """Superoperator of X -> a X b."""
    return np.kron(b.T, a)


def pair_superop(a, b):
    """Superoperator of rho -> a rho b^dag - {b^dag a, rho}/2."""
    bd = b.conj().T
    bda = bd @ a
    return sandwich(a, bd) - 0.5 * (spre(bda) + spost(bda))


def apply_pair(a, b, rho):
    """Matrix-level twin of :func:`pair_superop`."""
    bd = b.conj().T
    bda = bd @ a
    return a @ rho @ bd - 0.5 * (bda @ rho + rho @ bda)


@dataclass(frozen=True)
class Liouvillian:
    """Generator on column-stacked 4x4 density matrices.

    ``physical`` is False when the dissipator's coefficient matrices are not
    positive semidefinite; such generators can be built for diagnostics but
    solvers mark their output.
    """

    matrix: np.ndarray
    physical: bool = True

    def __add__(self, other: "Liouvillian") -> "Liouvillian":
        return Liouvillian(self.matrix + other.matrix, self.physical and other.physical)

    def __matmul__(self, v):
        return self.matrix @ v

    def apply(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))

    @property
    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, 2))

    def trace_defect(self) -> float:
        """max |vec(I)^dag L|; zero for a trace-preserving generator."""
        return float(np.max(np.abs(vec(I4).conj() @ self.matrix)))


class PSDCheck(NamedTuple):
    physical: bool
    margin_e: float
    margin_a: float


def validate_psd(rates: RateSet) -> PSDCheck:
    """Check local >= |nonlocal| for emission and absorption."""
    me = rates.gamma_e_local - abs(rates.gamma_e_nonlocal)
    ma = rates.gamma_a_local - abs(rates.gamma_a_nonlocal)
    return PSDCheck(me >= -PSD_TOL and ma >= -PSD_TOL, me, ma)


def _rate(rates: RateSet, kind: str, i: int, j: int) -> float:
    if kind == "e":
        return rates.gamma_e_local if i == j else rates.gamma_e_nonlocal
    return rates.gamma_a_local if i == j else rates.gamma_a_nonlocal


def build_dissipator(rates: RateSet) -> Liouvillian:
    m = np.zeros((16, 16), dtype=complex)
    for i in range(2):
        for j in range(2):
            ge = _rate(rates, "e", i, j)
            ga = _rate(rates, "a", i, j)
            if ge:
                m += ge * pair_superop(SM[i], SM[j])
            if ga:
                m += ga * pair_superop(SP[i], SP[j])
    return Liouvillian(m, validate_psd(rates).physical)


def hamiltonian(Delta: float = 1.0) -> np.ndarray:
    """H_S = Delta/2 (sigma_z x 1 + 1 x sigma_z)."""
    return 0.5 * Delta * (SZ[0] + SZ[1])


def build_hamiltonian_part(Delta: float = 1.0) -> Liouvillian:
    h = hamiltonian(Delta)
    return Liouvillian(-1j * (spre(h) - spost(h)))


def build_liouvillian(rates: RateSet, Delta: float | None = 1.0) -> Liouvillian:
    """Dissipator plus -i[H_S, .]; pass ``Delta=None`` to leave out the Hamiltonian."""
    lv = build_dissipator(rates)
    return lv if Delta is None else lv + build_hamiltonian_part(Delta)


@dataclass(frozen=True)
class JumpChannel:
    rate: float
    operator: np.ndarray
    label: str


def _sgn(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def jump_decomposition(rates: RateSet) -> list[JumpChannel]:
    """Diagonal (collective/anti-collective) form of the dissipator.

    Operators are normalized, (s1 +/- sgn * s2)/sqrt(2), and carry rates
    local +/- |nonlocal|.
    """
    check = validate_psd(rates)
    if not check.physical:
        raise ValueError(f"rates are not physical (margins {check.margin_e:.3g}, {check.margin_a:.3g})")
    out = []
    for kind, ops, loc, nl in (("a", SP, rates.gamma_a_local, rates.gamma_a_nonlocal),
                               ("e", SM, rates.gamma_e_local, rates.gamma_e_nonlocal)):
        s = _sgn(nl)
        for sign, tag in ((1.0, "sym"), (-1.0, "anti")):
            op = (ops[0] + sign * s * ops[1]) / math.sqrt(2.0)
            out.append(JumpChannel(max(loc + sign * abs(nl), 0.0), op, f"{kind}-{tag}"))
    return out


def dissipator_from_jumps(channels) -> np.ndarray:
    m = np.zeros((16, 16), dtype=complex)
    for ch in channels:
        m += ch.rate * pair_superop(ch.operator, ch.operator)
    return m


def thermal_ratio(kT: float) -> float:
    """exp(-Delta/kT) in units of Delta; infinite kT maps to 1."""
    if kT == 0:
        raise ValueError("kT = 0 is a degenerate limit; pass a small nonzero value")
    if math.isinf(kT):
        return 1.0
    try:
        return math.exp(-1.0 / kT)
    except OverflowError:
        raise ValueError(f"kT = {kT} gives an overflowing rate ratio") from None


def rates_from_temperatures(gamma_e0: float, f_e: float, kT0: float, kTr: float,
                            sign_a: int = 1) -> RateSet:
    """Phenomenological rates: emission-referenced, temperatures in units of Delta.

    ``f_e`` is the signed ratio Gamma_e(r)/Gamma_e(0); the sign of Gamma_a(r)
    is ``sign_a * sgn(f_e)``. The result may be unphysical; check it with
    :func:`validate_psd`.
    """
    if not gamma_e0 > 0:
        raise ValueError("gamma_e0 must be positive")
    ger = f_e * gamma_e0
    gar = _sgn(sign_a) * _sgn(f_e) * abs(ger) * thermal_ratio(kTr)
    return RateSet(gamma_e0, ger, gamma_e0 * thermal_ratio(kT0), gar)


def rates_from_temperatures_absorption(gamma_a0: float, f_a: float, kT0: float, kTr: float,
                                       sign_e: int = 1) -> RateSet:
    """Absorption-referenced twin of :func:`rates_from_temperatures` (for T < 0 studies)."""
    if not gamma_a0 > 0:
        raise ValueError("gamma_a0 must be positive")
    gar = f_a * gamma_a0
    ger = _sgn(sign_e) * _sgn(f_a) * abs(gar) / thermal_ratio(kTr)
    return RateSet(gamma_a0 / thermal_ratio(kT0), ger, gamma_a0, gar)


def gibbs_state(kT: float, Delta: float = 1.0) -> np.ndarray:
    """exp(-H_S/kT)/Z; negative kT gives the inverted ensemble."""
    if kT == 0:
        raise ValueError("kT must be nonzero")
    e = np.real(np.diag(hamiltonian(Delta)))
    w = np.exp(-(e - (e.min() if kT > 0 else e.max())) / kT)
    return np.diag(w / w.sum()).astype(complex)


def detailed_balance_residual(rates: RateSet, kT_over_D: float) -> float:
    """max over (i, j) of max|L^e_ij[rho_T] + L^a_ji[rho_T]| at the Gibbs state."""
    rho = gibbs_state(kT_over_D)
    worst = 0.0
    for i in range(2):
        for j in range(2):
            le = _rate(rates, "e", i, j) * apply_pair(SM[i], SM[j], rho)
            la = _rate(rates, "a", j, i) * apply_pair(SP[j], SP[i], rho)
            worst = max(worst, float(np.max(np.abs(le + la))))
    return worst
