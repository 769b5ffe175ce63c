"""Inverted 2D magnet as a dissipative environment for two qubits.

Conventions: k_B = hbar = 1. The natural units are the qubit gap Delta for
energies and ell = sqrt(A s / Delta) for lengths; nothing here enforces
them, but the CLI and the tests use Delta = A = s = 1 so that ell = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .bessel import j0

CHANNELS = (1, -1)


class OutOfBandError(ValueError):
    pass


class BoseStabilityError(ArithmeticError):
    """Bose occupation would be negative or divergent (exponent <= 0)."""


@dataclass(frozen=True)
class MagnetParams:
    """Stiffness ``A``, saturated spin density ``s``, field ``b``, temperature and spin accumulation."""

    A: float = 1.0
    s: float = 1.0
    b: float = 1.0
    T_E: float = 0.0
    mu: float = -2.0

    def __post_init__(self):
        if not (self.A > 0 and self.s > 0 and self.b > 0):
            raise ValueError("magnet requires A > 0, s > 0 and b > 0")
        if not self.T_E >= 0:
            raise ValueError("T_E must be non-negative")
        if self.T_E > 0 and not self.mu < -self.b:
            raise ValueError("finite T_E requires mu < -b (inverted magnet)")

    @property
    def As(self) -> float:
        return self.A * self.s


@dataclass(frozen=True)
class CouplingParams:
    """Magnitudes of the spin-conserving (``lambda_plus``) and non-conserving couplings."""

    lambda_plus: float
    lambda_minus: float

    def __post_init__(self):
        if self.lambda_plus < 0 or self.lambda_minus < 0:
            raise ValueError("coupling magnitudes must be non-negative")
        if self.lambda_plus == 0 and self.lambda_minus == 0:
            raise ValueError("at least one coupling must be nonzero")

    @classmethod
    def from_ratio(cls, ratio: float, lambda_minus: float = 1.0) -> "CouplingParams":
        """|lambda_plus / lambda_minus| = ratio."""
        return cls(abs(ratio) * lambda_minus, lambda_minus)

    def strength(self, n: int) -> float:
        """|lambda_n|^2."""
        if n == 1:
            return self.lambda_plus ** 2
        if n == -1:
            return self.lambda_minus ** 2
        raise ValueError(f"invalid channel index {n!r}")


@dataclass(frozen=True)
class SystemParams:
    Delta: float = 1.0
    r: float = 0.0

    def __post_init__(self):
        if not self.Delta > 0:
            raise ValueError("qubit gap Delta must be positive")
        if not self.r >= 0:
            raise ValueError("separation r must be non-negative")


@dataclass(frozen=True)
class RateSet:
    """Local and nonlocal emission/absorption rates of the two-qubit dissipator.

    Nonlocal entries carry a sign; physicality (local >= |nonlocal|) is checked
    by :func:`magnon_entangle.lindblad.validate_psd`, not here.
    """

    gamma_e_local: float
    gamma_e_nonlocal: float
    gamma_a_local: float
    gamma_a_nonlocal: float

    def __post_init__(self):
        if self.gamma_e_local < 0 or self.gamma_a_local < 0:
            raise ValueError("local rates must be non-negative")
        for v in self.as_tuple():
            if not math.isfinite(v):
                raise ValueError("rates must be finite")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.gamma_e_local, self.gamma_e_nonlocal, self.gamma_a_local, self.gamma_a_nonlocal)

    def swapped(self) -> "RateSet":
        """Exchange the roles of emission and absorption."""
        return RateSet(self.gamma_a_local, self.gamma_a_nonlocal, self.gamma_e_local, self.gamma_e_nonlocal)

    def scaled(self, factor: float) -> "RateSet":
        return RateSet(*(factor * v for v in self.as_tuple()))

    def normalized(self) -> "RateSet":
        """Divide by the largest local rate (steady states only see ratios)."""
        ref = max(self.gamma_e_local, self.gamma_a_local)
        return self if ref == 0 else self.scaled(1.0 / ref)


def bessel_j0(x: float) -> float:
    return j0(x)


def dispersion(k: float, p: MagnetParams) -> float:
    if k < 0:
        raise ValueError("wavevector magnitude must be non-negative")
    return p.As * k * k - p.b


def wavevector(omega: float, p: MagnetParams) -> float:
    """Magnon wavevector at energy ``omega``: sqrt((omega + b) / As)."""
    if omega + p.b < 0:
        raise OutOfBandError(f"omega={omega} lies below the band bottom -b={-p.b}")
    return math.sqrt((omega + p.b) / p.As)


def dos(omega: float, p: MagnetParams) -> float:
    """2D density of states; the band edge omega = -b counts as inside."""
    return 1.0 / (4 * math.pi * p.As) if omega + p.b >= 0 else 0.0


def bose(omega: float, p: MagnetParams) -> float:
    if p.T_E == 0:
        return 0.0
    x = (omega - p.mu) / p.T_E
    if not x > 0:
        raise BoseStabilityError(f"(omega - mu)/T_E = {x} <= 0")
    if x > 700.0:
        return math.exp(-x)  # expm1 would overflow; 1/(e^x - 1) = e^-x here
    return 1.0 / math.expm1(x)


def _check_channel(n):
    if n not in CHANNELS:
        raise ValueError(f"invalid channel index {n!r}; expected +1 or -1")


def _weights(n: int, omega: float, r: float, p: MagnetParams):
    """(prefactor 4 pi s g J0, bose occupation) for the magnon mode the channel touches.

    n = +1 couples to the magnon at energy +omega, n = -1 to the one at -omega.
    Returns None outside the band.
    """
    e = omega if n == 1 else -omega
    g = dos(e, p)
    if g == 0.0:
        return None
    amp = 4 * math.pi * p.s * g * j0(r * wavevector(e, p))
    return amp, bose(e, p)


def corr_plus(n: int, omega: float, r: float, p: MagnetParams) -> float:
    """Emission-side correlation C^+_n(omega, r)."""
    _check_channel(n)
    w = _weights(n, omega, r, p)
    if w is None:
        return 0.0
    amp, occ = w
    return amp * (occ + 1.0) if n == 1 else amp * occ


def corr_minus(n: int, omega: float, r: float, p: MagnetParams) -> float:
    """Absorption-side correlation C^-_n(omega, r)."""
    _check_channel(n)
    w = _weights(n, omega, r, p)
    if w is None:
        return 0.0
    amp, occ = w
    return amp * occ if n == 1 else amp * (occ + 1.0)


def kms_verify(n: int, omega: float, r: float, p: MagnetParams, relative: bool = False) -> float:
    """|C^-_n / C^+_n - exp(-(omega - n mu) / T_E)|.

    With ``relative=True`` the residual is divided by the exponential, which
    keeps it meaningful when the ratio is far from 1 (an absolute residual
    cannot go below ~1e-16 * ratio in double precision).
    """
    _check_channel(n)
    if not p.T_E > 0:
        raise ValueError("KMS ratio needs T_E > 0")
    cp = corr_plus(n, omega, r, p)
    if cp == 0.0:
        raise ZeroDivisionError("C^+ vanishes at this point")
    expected = math.exp(-(omega - n * p.mu) / p.T_E)
    resid = abs(corr_minus(n, omega, r, p) / cp - expected)
    return resid / expected if relative else resid


def magnet_rates(sys: SystemParams, cpl: CouplingParams, p: MagnetParams) -> RateSet:
    def gamma(corr, r):
        return sum(cpl.strength(n) * corr(n, sys.Delta, r, p) for n in CHANNELS)

    return RateSet(
        gamma(corr_plus, 0.0), gamma(corr_plus, sys.r),
        gamma(corr_minus, 0.0), gamma(corr_minus, sys.r),
    )


class EffectiveTemperature(NamedTuple):
    ratio: float
    kT: float
    """kT / Delta; +inf at ratio 1, 0.0 for pure emission, -0.0 for pure absorption."""


def effective_temperature(gamma_e: float, gamma_a: float, Delta: float = 1.0) -> EffectiveTemperature:
    """Temperature of a rate pair under exp(-Delta/kT) = |gamma_a / gamma_e|, in units of Delta.

    ``Delta`` is accepted for signature symmetry; the result is already scaled by it.
    """
    if gamma_e == 0:
        return EffectiveTemperature(math.inf, -0.0)
    x = abs(gamma_a / gamma_e)
    if x == 0:
        return EffectiveTemperature(0.0, 0.0)
    if x == 1:
        return EffectiveTemperature(1.0, math.inf)
    return EffectiveTemperature(x, -1.0 / math.log(x))


def couplings_from_angle(J: float, theta: float) -> tuple[float, float]:
    """Exchange coupling tilted by ``theta``: returns (c, chi).

    ``c`` multiplies the spin-conserving flip-flop terms and ``chi`` the
    non-conserving ones; |c| and |chi| play the roles of lambda_plus and
    lambda_minus (see :func:`coupling_params_from_angle`).
    """
    ct = math.cos(theta)
    return -J * (1 + ct), -J * (1 - ct)


def coupling_params_from_angle(J: float, theta: float) -> CouplingParams:
    c, chi = couplings_from_angle(J, theta)
    return CouplingParams(abs(c), abs(chi))
