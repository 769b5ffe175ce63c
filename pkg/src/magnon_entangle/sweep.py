"""Parameter registry, single-point evaluation and grid sweeps to CSV.

Units: Delta = 1 for energies, ell = sqrt(A s / Delta) for lengths, and
temperatures are kT/Delta.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .entanglement import concurrence, purity
from .environment import (
    CouplingParams,
    MagnetParams,
    RateSet,
    SystemParams,
    coupling_params_from_angle,
    effective_temperature,
    magnet_rates,
)
from .lindblad import (
    build_liouvillian,
    rates_from_temperatures,
    rates_from_temperatures_absorption,
    validate_psd,
)
from .steady import spectral_gap, steady_state

MODES = ("phenomenological", "magnet")


@dataclass(frozen=True)
class Param:
    default: object
    kind: type
    help: str
    modes: tuple = MODES


# name -> (default, type, description). This table is the single source of defaults.
REGISTRY: dict[str, Param] = {
    "mode": Param("phenomenological", str, "phenomenological | magnet"),
    "Delta": Param(1.0, float, "qubit gap (energy unit; keep 1)"),
    "hamiltonian": Param(1, int, "include -i[H_S, .] in the generator (0/1)"),
    # phenomenological
    "reference": Param("emission", str, "emission: f_e and gamma_e0 fix the scale; absorption: f_a and gamma_a0",
                       ("phenomenological",)),
    "gamma_e0": Param(1.0, float, "local emission rate (emission reference)", ("phenomenological",)),
    "gamma_a0": Param(1.0, float, "local absorption rate (absorption reference)", ("phenomenological",)),
    "f_e": Param(0.99, float, "signed Gamma_e(r)/Gamma_e(0)", ("phenomenological",)),
    "f_a": Param(0.99, float, "signed Gamma_a(r)/Gamma_a(0)", ("phenomenological",)),
    "kT0": Param(0.3, float, "local effective temperature kT(0)/Delta", ("phenomenological",)),
    "kTr": Param(0.2, float, "nonlocal effective temperature kT(r)/Delta", ("phenomenological",)),
    "sign_a": Param(1, int, "sign of Gamma_a(r) relative to Gamma_e(r) (emission reference)",
                    ("phenomenological",)),
    "sign_e": Param(1, int, "sign of Gamma_e(r) relative to Gamma_a(r) (absorption reference)",
                    ("phenomenological",)),
    # magnet
    "ratio": Param(0.135, float, "|lambda_1 / lambda_-1|", ("magnet",)),
    "theta": Param(math.nan, float, "exchange tilt angle in radians; overrides ratio when set", ("magnet",)),
    "J": Param(1.0, float, "exchange constant used with theta", ("magnet",)),
    "b": Param(1.0, float, "field b/Delta", ("magnet",)),
    "r": Param(0.5, float, "qubit separation r/ell", ("magnet",)),
    "T_E": Param(0.0, float, "magnet temperature k T_E / Delta", ("magnet",)),
    "mu": Param(math.nan, float, "spin accumulation mu/Delta; default -(b + 1)", ("magnet",)),
    "A": Param(1.0, float, "spin stiffness", ("magnet",)),
    "s": Param(1.0, float, "saturated spin density", ("magnet",)),
}

COLUMNS = (
    "gamma_e_local", "gamma_e_nonlocal", "gamma_a_local", "gamma_a_nonlocal",
    "kT0", "kTr", "concurrence", "gap", "physical", "multiplicity", "purity", "error",
)
RESULT_COLUMNS = ("concurrence", "gap", "multiplicity", "purity")


class ConfigError(ValueError):
    pass


def _coerce(name: str, value):
    if name not in REGISTRY:
        raise ConfigError(f"unknown parameter {name!r}; known: {', '.join(REGISTRY)}")
    kind = REGISTRY[name].kind
    try:
        if kind is int:
            return int(float(value))
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {name}={value!r} is not a valid {kind.__name__}") from None


def resolve_params(overrides: dict | None = None) -> dict:
    """Registry defaults updated with ``overrides`` (values coerced)."""
    params = {k: p.default for k, p in REGISTRY.items()}
    for k, v in (overrides or {}).items():
        params[k] = _coerce(k, v)
    if params["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    if params["reference"] not in ("emission", "absorption"):
        raise ConfigError("reference must be 'emission' or 'absorption'")
    return params


def relevant_params(params: dict) -> dict:
    mode = params["mode"]
    return {k: v for k, v in params.items() if mode in REGISTRY[k].modes}


def rates_for(params: dict) -> RateSet:
    if params["mode"] == "magnet":
        theta = params["theta"]
        if math.isnan(theta):
            cpl = CouplingParams.from_ratio(params["ratio"])
        else:
            cpl = coupling_params_from_angle(params["J"], theta)
        mu = params["mu"]
        if math.isnan(mu):
            mu = -(params["b"] + 1.0)
        magnet = MagnetParams(A=params["A"], s=params["s"], b=params["b"], T_E=params["T_E"], mu=mu)
        rates = magnet_rates(SystemParams(params["Delta"], params["r"]), cpl, magnet)
        # report in units of 4 pi s g_2D lambda_ref^2 = lambda_ref^2 / A
        lam_ref = max(cpl.lambda_plus, cpl.lambda_minus)
        return rates.scaled(magnet.A / lam_ref ** 2)
    if params["reference"] == "absorption":
        return rates_from_temperatures_absorption(params["gamma_a0"], params["f_a"], params["kT0"],
                                                  params["kTr"], params["sign_e"])
    return rates_from_temperatures(params["gamma_e0"], params["f_e"], params["kT0"], params["kTr"],
                                   params["sign_a"])


def _temperature(ge, ga):
    if ge == 0 and ga == 0:
        return math.nan
    return effective_temperature(ge, ga).kT


def evaluate_point(params: dict) -> dict:
    """Rates, effective temperatures and (if physical) steady-state results.

    Failures are captured in the ``error`` field rather than raised.
    """
    row = {c: None for c in COLUMNS}
    row["error"] = ""
    try:
        rates = rates_for(params)
    except (ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    (row["gamma_e_local"], row["gamma_e_nonlocal"],
     row["gamma_a_local"], row["gamma_a_nonlocal"]) = rates.as_tuple()
    row["kT0"] = _temperature(rates.gamma_e_local, rates.gamma_a_local)
    row["kTr"] = _temperature(rates.gamma_e_nonlocal, rates.gamma_a_nonlocal)
    physical = validate_psd(rates).physical
    row["physical"] = int(physical)
    if not physical:
        return row
    try:
        delta = params["Delta"] if params["hamiltonian"] else None
        L = build_liouvillian(rates, delta)
        ss = steady_state(L)
        gap = spectral_gap(L)
        row["concurrence"] = concurrence(ss.state).value
        row["gap"] = gap.gap
        row["multiplicity"] = ss.multiplicity
        row["purity"] = purity(ss.state)
    except (ValueError, ArithmeticError) as exc:
        for c in RESULT_COLUMNS:
            row[c] = None
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``name:min:max:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"axis {text!r} must look like name:min:max:count")
        name = parts[0].strip()
        try:
            start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise ConfigError(f"axis {text!r} has non-numeric bounds or count") from None
        return cls(name, start, stop, count)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def __str__(self):
        return f"{self.name}:{self.start!r}:{self.stop!r}:{self.count}"


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis | None = None
    fixed: dict = field(default_factory=dict)
    outputs: tuple = COLUMNS

    def __post_init__(self):
        params = resolve_params(self.fixed)
        axes = [a for a in (self.axis1, self.axis2) if a is not None]
        for a in axes:
            if a.name not in REGISTRY or REGISTRY[a.name].kind is not float:
                raise ConfigError(f"axis parameter {a.name!r} is not a numeric registry parameter")
            if params["mode"] not in REGISTRY[a.name].modes:
                raise ConfigError(f"axis {a.name!r} has no effect in {params['mode']} mode")
            # A single point is allowed only when it is unambiguous.
            if a.count < 1 or (a.count == 1 and a.start != a.stop):
                raise ConfigError(f"axis {a.name!r}: need count >= 2 (or count 1 with min == max)")
        if self.axis2 is not None and self.axis1.name == self.axis2.name:
            raise ConfigError("axes must be distinct")
        unknown = [c for c in self.outputs if c not in COLUMNS]
        if unknown:
            raise ConfigError(f"unknown output columns {unknown}")

    @property
    def axes(self) -> list[Axis]:
        return [a for a in (self.axis1, self.axis2) if a is not None]

    def points(self) -> list[dict]:
        """Resolved parameter dicts in row-major order over (axis1, axis2)."""
        base = resolve_params(self.fixed)
        out = []
        v1 = self.axis1.values()
        v2 = self.axis2.values() if self.axis2 is not None else [None]
        for x in v1:
            for y in v2:
                p = dict(base)
                p[self.axis1.name] = float(x)
                if y is not None:
                    p[self.axis2.name] = float(y)
                out.append(p)
        return out


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value).replace(",", ";").replace("\n", " ")


def default_workers() -> int:
    return os.cpu_count() or 1


def run_points(points: list[dict], workers: int = 1) -> list[dict]:
    if workers <= 1 or len(points) < 2:
        return [evaluate_point(p) for p in points]
    chunk = max(1, len(points) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate_point, points, chunksize=chunk))


def metadata_lines(spec: SweepSpec) -> list[str]:
    params = relevant_params(resolve_params(spec.fixed))
    axis_names = {a.name for a in spec.axes}
    lines = [f"# magnon_entangle {__version__}"]
    lines += [f"# axis{i + 1} = {a}" for i, a in enumerate(spec.axes)]
    lines += [f"# {k} = {fmt(v)}" for k, v in params.items() if k not in axis_names]
    return lines


def header(spec: SweepSpec) -> list[str]:
    """Axis columns, then outputs; an output sharing an axis name gets an ``_eff`` suffix."""
    axis_names = [a.name for a in spec.axes]
    return axis_names + [c + "_eff" if c in axis_names else c for c in spec.outputs]


def write_csv(spec: SweepSpec, rows: list[dict], stream) -> None:
    axis_names = [a.name for a in spec.axes]
    points = spec.points()
    for line in metadata_lines(spec):
        stream.write(line + "\n")
    stream.write(",".join(header(spec)) + "\n")
    for p, row in zip(points, rows):
        cells = [fmt(p[n]) for n in axis_names] + [fmt(row[c]) for c in spec.outputs]
        stream.write(",".join(cells) + "\n")


def run_sweep(spec: SweepSpec, workers: int = 1, stream=None) -> str | None:
    """Evaluate every grid point and write CSV to ``stream`` (or return it as text)."""
    rows = run_points(spec.points(), workers)
    if stream is None:
        buf = io.StringIO()
        write_csv(spec, rows, buf)
        return buf.getvalue()
    write_csv(spec, rows, stream)
    return None


def read_csv(text: str) -> tuple[dict, list[dict]]:
    """Parse a sweep CSV back into (metadata, rows of strings)."""
    meta, header, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            if "=" in line:
                k, v = line[1:].split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        cells = line.split(",")
        if header is None:
            header = cells
        else:
            rows.append(dict(zip(header, cells)))
    return meta, rows


def parse_config(text: str) -> dict:
    """key=value lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out
