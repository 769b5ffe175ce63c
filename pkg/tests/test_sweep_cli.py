import json
import math

import pytest

from magnon_entangle import cli
from magnon_entangle.sweep import (
    COLUMNS,
    Axis,
    ConfigError,
    SweepSpec,
    evaluate_point,
    parse_config,
    read_csv,
    resolve_params,
    run_sweep,
)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def steady(capsys, *pairs):
    code, out, _ = run(["steady", *pairs], capsys)
    assert code == 0
    return json.loads(out)


def body(csv_text):
    return [line for line in csv_text.splitlines() if not line.startswith("#")]


def test_rates_magnet_local_temperature(capsys):
    code, out, _ = run(["rates", "mode=magnet", "ratio=0.135", "b=1.0", "r=0"], capsys)
    assert code == 0
    header, values = out.strip().splitlines()
    row = dict(zip(header.split(","), map(float, values.split(","))))
    assert abs(row["kT0"] - (-0.25)) <= 1e-3
    assert row["physical"] == 1


@pytest.mark.parametrize("r", ["0.5", "2", "5", "11.7"])
def test_rates_band_edge_absorption_is_uniform(capsys, r):
    _, out, _ = run(["rates", "mode=magnet", "b=1.0", f"r={r}"], capsys)
    header, values = out.strip().splitlines()
    row = dict(zip(header.split(","), values.split(",")))
    assert float(row["abs_gamma_a_r_over_0"]) == 1.0


def test_rates_below_threshold_is_emission_only(capsys):
    _, out, _ = run(["rates", "mode=magnet", "b=0.5"], capsys)
    header, values = out.strip().splitlines()
    row = dict(zip(header.split(","), values.split(",")))
    assert float(row["gamma_a_local"]) == 0.0 and float(row["gamma_a_nonlocal"]) == 0.0
    assert float(row["gamma_e_local"]) > 0


def test_steady_thermal_line(capsys):
    rep = steady(capsys, "kT0=0.7", "kTr=0.7", "f_e=0.6")
    assert rep["concurrence"] <= 1e-9
    z = math.exp(-1 / 0.7) + 2 + math.exp(1 / 0.7)
    assert rep["rho_real"][3][3] == pytest.approx(math.exp(1 / 0.7) / z, abs=1e-10)
    assert rep["block_vs_nullspace"] <= 1e-8


def test_steady_entangled(capsys):
    rep = steady(capsys, "f_e=0.99", "kTr=0.2", "kT0=0.3")
    assert rep["concurrence"] > 0.2
    assert rep["multiplicity"] == 1 and rep["physical"] == 1


@pytest.mark.xfail(strict=True, reason="entangled window at f_e=0.99, kT(r)=0.2 ends near kT(0)=0.68")
def test_steady_entangled_at_unit_local_temperature(capsys):
    rep = steady(capsys, "f_e=0.99", "kTr=0.2", "kT0=1.0")
    assert rep["concurrence"] > 0


@pytest.mark.parametrize("kT0", ["0.25", "0.4", "1.0", "3.0"])
def test_steady_below_threshold(capsys, kT0):
    assert steady(capsys, "f_e=0.5", "kTr=0.2", f"kT0={kT0}")["concurrence"] <= 1e-9


def test_steady_unphysical_skips_solve(capsys):
    rep = steady(capsys, "f_e=0.99", "kTr=0.2", "kT0=0.1")
    assert rep["physical"] == 0
    assert "concurrence" not in rep and "rho_real" not in rep


def test_gap_command(capsys):
    code, out, _ = run(["gap", "mode=magnet", "b=1.1", "r=1.0"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["gap"] > 0 and rep["zero_count"] == 1
    assert len(rep["spectrum"]) == 16


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# phenomenological point\nf_e = 0.99\nkT0 = 0.3  # local\nkTr=0.2\n")
    a = steady(capsys, "--config", str(cfg))
    b = steady(capsys, "--config", str(cfg), "kT0=0.5")
    assert a["concurrence"] != b["concurrence"]
    assert b == steady(capsys, "f_e=0.99", "kT0=0.5", "kTr=0.2")


def test_parse_config_errors():
    assert parse_config("a = 1\n\n# c\nb=2 # x") == {"a": "1", "b": "2"}
    with pytest.raises(ConfigError):
        parse_config("no equals sign")


def test_exit_codes(tmp_path, capsys):
    assert run(["steady", "bogus=1"], capsys)[0] == 1
    assert run(["steady", "kT0=abc"], capsys)[0] == 1
    assert run(["steady", "kT0=0"], capsys)[0] == 1
    assert run(["steady", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 1
    assert run(["sweep", "--axis1", "kT0:0:1:1"], capsys)[0] == 1
    assert run(["sweep", "--axis1", "b:1:2:3"], capsys)[0] == 1
    assert run(["sweep", "--axis1", "kT0:0.1:1:3", "--axis2", "kT0:0.1:1:3"], capsys)[0] == 1
    with pytest.raises(SystemExit):
        cli.main(["verify", "nonsense"])


def test_numerical_failure_exit_code(capsys, monkeypatch):
    from magnon_entangle import linalg

    def boom(*a, **k):
        raise linalg.ConvergenceError("forced")

    monkeypatch.setattr(cli, "spectral_gap", boom)
    assert run(["gap"], capsys)[0] == 2


def test_global_flags_before_subcommand(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert cli.main(["--out", str(out), "steady", "kT0=0.3"]) == 0
    assert json.loads(out.read_text())["physical"] == 1


def test_axis_parse():
    a = Axis.parse("kT0:-1:2.5:4")
    assert (a.name, a.start, a.stop, a.count) == ("kT0", -1.0, 2.5, 4)
    with pytest.raises(ConfigError):
        Axis.parse("kT0:1:2")
    with pytest.raises(ConfigError):
        Axis.parse("kT0:a:2:3")


def test_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec(Axis("nope", 0, 1, 3))
    with pytest.raises(ConfigError):
        SweepSpec(Axis("kT0", 0, 1, 3), outputs=("concurrence", "bogus"))
    with pytest.raises(ConfigError):
        SweepSpec(Axis("r", 0, 1, 3))  # magnet-only axis in phenomenological mode
    SweepSpec(Axis("r", 0.1, 1, 3), fixed={"mode": "magnet"})


def test_sweep_layout_and_order():
    spec = SweepSpec(Axis("kT0", 0.3, 0.5, 2), Axis("kTr", 0.1, 0.2, 3))
    text = run_sweep(spec, 1)
    meta, rows = read_csv(text)
    assert meta["axis1"] == "kT0:0.3:0.5:2" and "kT0" not in meta and "f_e" in meta
    assert text.splitlines()[0].startswith("# magnon_entangle ")
    got = [v for r in rows for v in (float(r["kT0"]), float(r["kTr"]))]
    assert got == pytest.approx([0.3, 0.1, 0.3, 0.15, 0.3, 0.2, 0.5, 0.1, 0.5, 0.15, 0.5, 0.2], abs=1e-15)
    header = body(text)[0].split(",")
    assert header[:2] == ["kT0", "kTr"] and "kT0_eff" in header
    assert header[2:] == [c + "_eff" if c in ("kT0", "kTr") else c for c in COLUMNS]


def test_unphysical_rows_are_empty():
    spec = SweepSpec(Axis("kT0", 0.05, 0.3, 6), fixed={"kTr": "0.2"})
    _, rows = read_csv(run_sweep(spec, 1))
    flags = [r["physical"] for r in rows]
    assert "0" in flags and "1" in flags
    for r in rows:
        if r["physical"] == "0":
            assert r["concurrence"] == r["gap"] == r["multiplicity"] == r["purity"] == ""
            assert r["gamma_e_local"] != ""
        else:
            assert r["concurrence"] != ""


def test_errors_recorded_not_raised():
    _, rows = read_csv(run_sweep(SweepSpec(Axis("kT0", -1, 1, 3)), 1))
    assert rows[1]["error"].startswith("ValueError")
    assert rows[1]["physical"] == "" and rows[1]["concurrence"] == ""
    assert rows[0]["error"] == "" and rows[2]["error"] == ""


def test_workers_are_byte_identical():
    spec = SweepSpec(Axis("kT0", 0.05, 1.5, 5), Axis("kTr", -1.0, 1.0, 4))
    assert run_sweep(spec, 1) == run_sweep(spec, 2)


def test_one_point_sweep_equals_steady(capsys):
    code, out, _ = run(["sweep", "--axis1", "kT0:0.3:0.3:1", "f_e=0.99", "kTr=0.2"], capsys)
    assert code == 0
    _, rows = read_csv(out)
    rep = steady(capsys, "kT0=0.3", "f_e=0.99", "kTr=0.2")
    assert len(rows) == 1
    assert float(rows[0]["concurrence"]) == rep["concurrence"]
    assert float(rows[0]["gap"]) == rep["gap"]
    assert float(rows[0]["purity"]) == rep["purity"]


def test_rows_roundtrip_through_steady(capsys):
    spec = SweepSpec(Axis("b", 1.0, 1.2, 3), Axis("r", 0.25, 2.0, 3), fixed={"mode": "magnet"})
    _, rows = read_csv(run_sweep(spec, 1))
    for row in rows:
        rep = steady(capsys, "mode=magnet", f"b={row['b']}", f"r={row['r']}")
        assert abs(float(row["concurrence"]) - rep["concurrence"]) <= 1e-9
        assert abs(float(row["gap"]) - rep["gap"]) <= 1e-9


def test_evaluate_point_magnet_normalization():
    row = evaluate_point(resolve_params({"mode": "magnet", "b": "1.0", "r": "0", "ratio": "0.135"}))
    assert row["gamma_a_local"] == pytest.approx(1.0)
    assert row["gamma_e_local"] == pytest.approx(0.135 ** 2)


def test_theta_overrides_ratio():
    p = resolve_params({"mode": "magnet", "theta": str(math.pi / 2), "b": "1.5", "r": "0"})
    row = evaluate_point(p)
    assert row["gamma_a_local"] == pytest.approx(row["gamma_e_local"])


def test_verify_suites(capsys):
    for suite in ("kms", "psd", "detailed-balance", "oracles"):
        code, out, _ = run(["verify", suite, "--seed", "7"], capsys)
        lines = [json.loads(x) for x in out.strip().splitlines()]
        assert code == 0, lines
        assert lines[-1] == {"suite": suite, "passed": True, "checks": len(lines) - 1}
        assert all(x["passed"] and x["worst"] <= x["tol"] for x in lines[:-1])
