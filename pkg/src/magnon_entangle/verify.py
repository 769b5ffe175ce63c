"""Numerical verification suites: KMS, PSD, detailed balance, solver oracles."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np

from .entanglement import concurrence
from .environment import (
    CHANNELS,
    CouplingParams,
    MagnetParams,
    RateSet,
    SystemParams,
    corr_minus,
    corr_plus,
    kms_verify,
    magnet_rates,
)
from .lindblad import (
    build_dissipator,
    build_liouvillian,
    detailed_balance_residual,
    dissipator_from_jumps,
    gibbs_state,
    jump_decomposition,
    rates_from_temperatures,
    validate_psd,
)
from .linalg import hermitian_eig
from .steady import spectral_gap, steady_state, steady_state_block, steady_state_propagation

SUITES = ("kms", "psd", "detailed-balance", "oracles")


@dataclass
class Check:
    suite: str
    name: str
    worst: float
    tol: float
    count: int

    def __post_init__(self):
        self.worst = float(self.worst)

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.tol)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


KMS_MAX_EXPONENT = 12.0


def kms_grid(max_exponent: float | None = None):
    """(n, omega, r, magnet) points with T_E > 0 and mu < -b where C^+ is nonzero.

    ``max_exponent`` drops points with |omega - n mu|/T_E above it.
    """
    for b, T_E, mu_over_b, omega, r in itertools.product(
            (0.5, 1.0, 2.0), (0.3, 0.5, 1.0, 2.0), (-1.1, -2.0, -3.0),
            (0.25, 1.0, 1.5), (0.0, 0.7, 2.0)):
        p = MagnetParams(b=b, T_E=T_E, mu=mu_over_b * b)
        for n in CHANNELS:
            if max_exponent is not None and abs(omega - n * p.mu) / T_E > max_exponent:
                continue
            if corr_plus(n, omega, r, p) != 0.0:
                yield n, omega, r, p


def run_kms() -> list[Check]:
    absolute = [kms_verify(n, w, r, p) for n, w, r, p in kms_grid(KMS_MAX_EXPONENT)]
    relative = [kms_verify(n, w, r, p, relative=True) for n, w, r, p in kms_grid()]
    return [
        Check("kms", "|C-/C+ - exp(-(w - n mu)/T_E)|, ratio <= e^12", max(absolute), 1e-10, len(absolute)),
        Check("kms", "relative KMS residual, full grid", max(relative), 1e-12, len(relative)),
    ]


def magnet_rate_grid():
    for b, r, ratio, T_E in itertools.product(
            (0.5, 0.9, 1.0, 1.1, 1.3, 2.0), (0.0, 0.05, 0.5, 1.0, 2.405, 4.0, 9.0),
            (0.0, 0.135, 1.0, 3.0), (0.0, 0.2, 1.0)):
        yield (SystemParams(1.0, r), CouplingParams.from_ratio(ratio),
               MagnetParams(b=b, T_E=T_E, mu=-(b + 0.5)))


def run_psd() -> list[Check]:
    margins, corr_min, spec_max = [], [], []
    for sys, cpl, mag in magnet_rate_grid():
        rates = magnet_rates(sys, cpl, mag)
        chk = validate_psd(rates)
        margins.append(min(chk.margin_e, chk.margin_a))
        for n, corr in itertools.product(CHANNELS, (corr_plus, corr_minus)):
            m = np.array([[corr(n, 1.0, 0.0, mag), corr(n, 1.0, sys.r, mag)],
                          [corr(n, 1.0, sys.r, mag), corr(n, 1.0, 0.0, mag)]])
            corr_min.append(hermitian_eig(m)[0][0])
        spec_max.append(float(spectral_gap(build_liouvillian(rates.normalized())).spectrum.real.max()))
    return [
        Check("psd", "Gamma(0) - |Gamma(r)| >= -1e-12", -min(margins), 1e-12, len(margins)),
        Check("psd", "min eigenvalue of correlation matrices >= -1e-12", -min(corr_min), 1e-12, len(corr_min)),
        Check("psd", "max Re(lambda) of physical Liouvillians", max(spec_max), 1e-10, len(spec_max)),
    ]


DB_TEMPERATURES = (0.2, 0.5, 1.0, 5.0, -0.2, -0.5, -1.0, -5.0)
DB_FRACTIONS = (0.0, 0.3, 0.7, 0.99)


def run_detailed_balance() -> list[Check]:
    resid, gibbs_err, conc = [], [], []
    for kT, f in itertools.product(DB_TEMPERATURES, DB_FRACTIONS):
        rates = rates_from_temperatures(1.0, f, kT, kT)
        resid.append(detailed_balance_residual(rates, kT))
        ss = steady_state(build_liouvillian(rates.normalized()))
        gibbs_err.append(float(np.max(np.abs(ss.state - gibbs_state(kT)))))
        conc.append(concurrence(ss.state).value)
    n = len(resid)
    return [
        Check("detailed-balance", "max |L^e_ij[rho_T] + L^a_ji[rho_T]|", max(resid), 1e-12, n),
        Check("detailed-balance", "max |rho_ss - rho_Gibbs|", max(gibbs_err), 1e-8, n),
        Check("detailed-balance", "max concurrence on T(0) = T(r)", max(conc), 1e-9, n),
    ]


def random_physical_rates(rng, fmax: float = 0.9) -> RateSet:
    """Random physical rates with |nonlocal|/local <= fmax (nondegenerate steady state)."""
    ge0 = rng.uniform(0.1, 1.0)
    ga0 = rng.uniform(0.05, 1.0)
    return RateSet(ge0, rng.uniform(-fmax, fmax) * ge0, ga0, rng.uniform(-fmax, fmax) * ga0)


def run_oracles(seed: int = 0, count: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    three_way, jumps = [], []
    for _ in range(count):
        rates = random_physical_rates(rng)
        L = build_liouvillian(rates)
        a = steady_state(L).state
        b = steady_state_block(rates).state
        c = steady_state_propagation(L).state
        three_way.append(float(max(np.max(np.abs(a - b)), np.max(np.abs(a - c)), np.max(np.abs(b - c)))))
        direct = build_dissipator(rates).matrix
        jumps.append(float(np.max(np.abs(direct - dissipator_from_jumps(jump_decomposition(rates))))))
    return [
        Check("oracles", "nullspace / block / RK4 steady states", max(three_way), 1e-6, count),
        Check("oracles", "jump reassembly vs direct dissipator", max(jumps), 1e-12, count),
    ]


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, seed)]
    if name == "kms":
        return run_kms()
    if name == "psd":
        return run_psd()
    if name == "detailed-balance":
        return run_detailed_balance()
    if name == "oracles":
        return run_oracles(seed)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
