"""Steady-state entanglement of two qubits coupled to a pumped, spin-conserving magnet."""

__version__ = "0.1.0"

from .entanglement import concurrence, concurrence_block
from .environment import (
    CouplingParams,
    MagnetParams,
    RateSet,
    SystemParams,
    effective_temperature,
    magnet_rates,
)
from .lindblad import (
    build_dissipator,
    build_hamiltonian_part,
    build_liouvillian,
    jump_decomposition,
    rates_from_temperatures,
    validate_psd,
)
from .steady import propagate, spectral_gap, steady_state, steady_state_block

__all__ = [
    "CouplingParams", "MagnetParams", "RateSet", "SystemParams",
    "build_dissipator", "build_hamiltonian_part", "build_liouvillian",
    "concurrence", "concurrence_block", "effective_temperature", "jump_decomposition",
    "magnet_rates", "propagate", "rates_from_temperatures", "spectral_gap",
    "steady_state", "steady_state_block", "validate_psd",
]
