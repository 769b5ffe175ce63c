"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 verification-suite failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys

import numpy as np

from . import __version__, linalg
from .entanglement import concurrence, purity
from .environment import effective_temperature
from .lindblad import build_liouvillian, validate_psd
from .steady import (
    DegenerateSteadyStateError,
    spectral_gap,
    steady_state,
    steady_state_block,
)
from .sweep import (
    COLUMNS,
    REGISTRY,
    Axis,
    ConfigError,
    SweepSpec,
    default_workers,
    fmt,
    parse_config,
    rates_for,
    resolve_params,
    run_sweep,
)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
NON_PARAM_KEYS = ("axis1", "axis2", "outputs")


def _kv_pairs(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _settings(args) -> dict:
    """Config file values overridden by command-line key=value pairs."""
    settings = {}
    if args.config:
        with open(args.config) as fh:
            settings.update(parse_config(fh.read()))
    settings.update(_kv_pairs(args.params))
    return settings


def _split(settings: dict) -> tuple[dict, dict]:
    params = {k: v for k, v in settings.items() if k not in NON_PARAM_KEYS}
    extra = {k: v for k, v in settings.items() if k in NON_PARAM_KEYS}
    return params, extra


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _temps(rates) -> dict:
    t0 = effective_temperature(rates.gamma_e_local, rates.gamma_a_local)
    tr = effective_temperature(rates.gamma_e_nonlocal, rates.gamma_a_nonlocal)
    return {"kT0": t0.kT, "kTr": tr.kT}


def rates_report(params: dict) -> dict:
    rates = rates_for(params)
    chk = validate_psd(rates)
    ge0, ger, ga0, gar = rates.as_tuple()
    out = {
        "gamma_e_local": ge0, "gamma_e_nonlocal": ger,
        "gamma_a_local": ga0, "gamma_a_nonlocal": gar,
        **_temps(rates),
        "abs_gamma_e_r_over_0": abs(ger) / ge0 if ge0 else math.nan,
        "abs_gamma_a_r_over_0": abs(gar) / ga0 if ga0 else math.nan,
        "physical": int(chk.physical),
        "margin_e": chk.margin_e,
        "margin_a": chk.margin_a,
    }
    return out


def steady_report(params: dict) -> dict:
    """Everything ``steady`` prints, as a dict (no solve when unphysical)."""
    rates = rates_for(params)
    chk = validate_psd(rates)
    report = {
        "rates": list(rates.as_tuple()),
        **_temps(rates),
        "physical": int(chk.physical),
    }
    if not chk.physical:
        return report
    delta = params["Delta"] if params["hamiltonian"] else None
    L = build_liouvillian(rates, delta)
    ss = steady_state(L)
    gap = spectral_gap(L)
    c = concurrence(ss.state)
    try:
        block = steady_state_block(rates, delta)
        discrepancy = float(np.max(np.abs(block.state - ss.state)))
    except DegenerateSteadyStateError:
        discrepancy = None
    report.update({
        "rho_real": ss.state.real.tolist(),
        "rho_imag": ss.state.imag.tolist(),
        "multiplicity": ss.multiplicity,
        "residual": ss.residual,
        "concurrence": c.value,
        "wootters_lambdas": list(c.lambdas),
        "gap": gap.gap,
        "zero_count": gap.zero_count,
        "no_decay": gap.no_decay,
        "purity": purity(ss.state),
        "block_vs_nullspace": discrepancy,
    })
    return report


def gap_report(params: dict) -> dict:
    rates = rates_for(params)
    delta = params["Delta"] if params["hamiltonian"] else None
    L = build_liouvillian(rates, delta)
    g = spectral_gap(L)
    order = np.lexsort((g.spectrum.imag, -g.spectrum.real))
    return {
        "physical": int(L.physical),
        "gap": g.gap,
        "zero_count": g.zero_count,
        "oscillating_count": g.oscillating_count,
        "no_decay": g.no_decay,
        "eps_zero": g.eps_zero,
        "spectrum": [[float(z.real), float(z.imag)] for z in g.spectrum[order]],
    }


def _dump(obj, out):
    out.write(json.dumps(obj, indent=2, default=_jsonable, allow_nan=True) + "\n")


def cmd_rates(args, out) -> int:
    params = resolve_params(_split(_settings(args))[0])
    rep = rates_report(params)
    out.write(",".join(rep) + "\n")
    out.write(",".join(fmt(v) for v in rep.values()) + "\n")
    return EXIT_OK


def cmd_steady(args, out) -> int:
    params = resolve_params(_split(_settings(args))[0])
    _dump(steady_report(params), out)
    return EXIT_OK


def cmd_gap(args, out) -> int:
    params = resolve_params(_split(_settings(args))[0])
    _dump(gap_report(params), out)
    return EXIT_OK


def build_spec(settings: dict, axis1=None, axis2=None, outputs=None) -> SweepSpec:
    params, extra = _split(settings)
    a1 = axis1 or extra.get("axis1")
    a2 = axis2 or extra.get("axis2")
    if not a1:
        raise ConfigError("sweep needs --axis1 (name:min:max:count)")
    cols = outputs or extra.get("outputs")
    cols = tuple(c.strip() for c in cols.split(",")) if cols else COLUMNS
    return SweepSpec(Axis.parse(a1), Axis.parse(a2) if a2 else None, params, cols)


def cmd_sweep(args, out) -> int:
    spec = build_spec(_settings(args), args.axis1, args.axis2, args.outputs)
    workers = args.workers if args.workers is not None else default_workers()
    run_sweep(spec, workers, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    checks = run_suite(args.suite, seed=args.seed)
    for c in checks:
        out.write(json.dumps(c.as_dict()) + "\n")
    ok = all(c.passed for c in checks)
    out.write(json.dumps({"suite": args.suite, "passed": ok, "checks": len(checks)}) + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


def _registry_epilog() -> str:
    lines = ["parameters (key=value, defaults in brackets):"]
    for k, p in REGISTRY.items():
        lines.append(f"  {k:<11} [{p.default}] {p.help}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    # Global flags work before or after the subcommand; the subcommand copy
    # uses SUPPRESS so it does not clobber a value given before it.
    def add_common(parser, suppress):
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parser.add_argument("--config", default=d(None), help="key=value file; command-line pairs override it")
        parser.add_argument("--out", default=d("-"), help="output path, '-' for stdout")
        parser.add_argument("--workers", type=int, default=d(None), help="sweep worker processes [cpu count]")
        parser.add_argument("--seed", type=int, default=d(0), help="seed for randomized verification suites")

    common = argparse.ArgumentParser(add_help=False)
    add_common(common, suppress=True)

    ap = argparse.ArgumentParser(
        prog="magnon-entangle",
        description="Steady-state entanglement of two qubits near a pumped magnet.",
        epilog=_registry_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=__version__)
    add_common(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (("rates", cmd_rates, "print rates and effective temperatures"),
                               ("steady", cmd_steady, "steady state, concurrence and gap (JSON)"),
                               ("gap", cmd_gap, "Liouvillian spectrum and gap (JSON)")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("params", nargs="*", metavar="key=value")
        p.set_defaults(func=fn)

    p = sub.add_parser("sweep", parents=[common], help="grid sweep to CSV")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--axis1", help="name:min:max:count")
    p.add_argument("--axis2", help="name:min:max:count")
    p.add_argument("--outputs", help="comma-separated result columns")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("suite", nargs="?", default="all", choices=SUITES + ("all",))
    p.set_defaults(func=cmd_verify)
    return ap


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-", "stdout"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _open_out(args.out) as out:
            return args.func(args, out)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ArithmeticError, linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
