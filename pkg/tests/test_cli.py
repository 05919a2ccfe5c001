import json
import subprocess
import sys

import numpy as np
import pytest

from fluxlab.cli import main
from fluxlab.interaction import CSV_COLUMNS
from fluxlab.sweep import read_results


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def sin4_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("pot") / "sin4.csv"
    s = -np.pi + 2 * np.pi * np.arange(4096) / 4096
    np.savetxt(path, np.column_stack([s, np.sin(s) ** 4]), delimiter=",", header="s,V", comments="")
    return path


def test_validate(capsys, sin4_csv):
    code, out, _ = run(capsys, "validate", "--potential", "sin2")
    assert code == 0 and json.loads(out)["passed"] is True
    code, out, _ = run(capsys, "validate", "--potential", "tilted_sin2", "--params", "0.3")
    assert code == 0
    code, out, _ = run(capsys, "validate", "--potential-csv", str(sin4_csv))
    assert code == 2 and json.loads(out)["passed"] is False


def test_constants(capsys, sin4_csv):
    code, out, _ = run(capsys, "constants", "--potential", "sin2")
    d = json.loads(out)
    assert code == 0
    assert (d["kappa"], d["S"], d["A_u"], d["A_d"]) == pytest.approx((1, 2, 2, 2), rel=1e-10)
    d = json.loads(run(capsys, "constants", "--potential", "scaled_sin2", "--params", "2")[1])
    assert (d["kappa"], d["S"]) == pytest.approx((np.sqrt(2), 2 * np.sqrt(2)), rel=1e-10)
    d = json.loads(run(capsys, "constants", "--potential", "tilted_sin2", "--params", "0.3")[1])
    assert d["S_u"] > d["S_d"]
    code, _, err = run(capsys, "constants", "--potential-csv", str(sin4_csv))
    assert code == 2 and "validation failed" in err


def test_spectrum(capsys, tmp_path):
    out_path = tmp_path / "spec.json"
    code, _, _ = run(capsys, "spectrum", "--h", "0.2", "--xi0", "0", "--K", "64", "--out", str(out_path))
    d = json.loads(out_path.read_text())
    assert code == 0
    assert 0 < d["lambda1"] <= d["lambda2"] < 0.4 and d["gap"] > 0
    assert abs(d["dirichlet_ground"] - d["lambda1"]) <= 10 * d["gap"]
    code, out, _ = run(capsys, "spectrum", "--h", "0.05")
    assert code == 0 and json.loads(out)["gap"] is None
    code, _, err = run(capsys, "spectrum", "--h-grid", "0.1,0.2")
    assert code == 4 and "single value" in err


@pytest.fixture(scope="module")
def flux_sweep(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweep") / "flux.csv"
    code = main(["sweep", "--h-grid", "0.1,0.12,0.15", "--xi0-grid", "0:0.24:97", "--jobs", "3",
                 "--out", str(path)])
    assert code == 0
    return path


def test_sweep_rows(flux_sweep):
    lines = flux_sweep.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 291


def test_sweep_to_stdout_is_byte_identical(capsys):
    argv = ["sweep", "--h", "0.12", "--xi0-grid", "0:0.06:3", "--routes", "direct,leading"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second and first.count("\n") == 4
    js = run(capsys, *argv, "--format", "json")[1]
    assert len(json.loads(js)) == 3


def test_crossings(capsys, flux_sweep):
    code, out, _ = run(capsys, "crossings", str(flux_sweep), "--h", "0.12")
    d = json.loads(out)
    assert code == 0
    assert d["analytic"] == pytest.approx([0.06, 0.18])
    step = 0.0025
    for route in ("direct", "wronskian"):
        found = sorted(m["xi0"] for m in d["minima"] if m["route"] == route)
        assert len(found) == 2
        assert all(abs(a - b) <= step for a, b in zip(found, (0.06, 0.18)))
    code, _, err = run(capsys, "crossings", str(flux_sweep))
    assert code == 4 and "--h" in err
    code, _, _ = run(capsys, "crossings", str(flux_sweep), "--h", "0.3")
    assert code == 4


def test_crossings_tilted(capsys, tmp_path):
    path = tmp_path / "tilted.csv"
    assert main(["sweep", "--potential", "tilted_sin2", "--params", "0.3", "--h", "0.12",
                 "--xi0-grid", "0:0.24:33", "--out", str(path)]) == 0
    d = json.loads(run(capsys, "crossings", str(path))[1])
    assert d["minima"] == [] and d["analytic"] == []


def test_fit_decay(capsys, tmp_path):
    path = tmp_path / "decay.csv"
    assert main(["sweep", "--h-grid", "0.09:0.2:5:log", "--xi0", "0", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "fit-decay", str(path))
    d = json.loads(out)
    assert code == 0
    assert d["leading"]["slope"] == pytest.approx(-2.0, rel=1e-10)
    assert d["direct"]["slope"] == pytest.approx(-2.0, rel=0.03)
    assert d["wronskian"]["slope"] == pytest.approx(-2.0, rel=0.03)
    raw = json.loads(run(capsys, "fit-decay", str(path), "--routes", "direct", "--prefactor-power", "0")[1])
    assert list(raw) == ["direct"] and raw["direct"]["slope"] == pytest.approx(-2.0, rel=0.03)
    code, _, _ = run(capsys, "fit-decay", str(path), "--xi0", "0.5")
    assert code == 4


def test_fit_decay_without_finite_gaps(capsys, tmp_path):
    path = tmp_path / "nan.csv"
    rows = [",".join(CSV_COLUMNS)]
    for h in (0.04, 0.05):
        rows.append(",".join([str(h), "0"] + ["nan"] * (len(CSV_COLUMNS) - 3) + ["below_floor"]))
    path.write_text("\n".join(rows) + "\n")
    assert read_results(str(path))["flags"] == ["below_floor", "below_floor"]
    code, _, err = run(capsys, "fit-decay", str(path))
    assert code == 3 and "precision" in err


def test_wkb_compare(capsys):
    code, out, _ = run(capsys, "wkb-compare", "--h-grid", "0.2,0.1", "--compact=-1.8:1.8")
    d = json.loads(out)
    assert code == 0 and [r["h"] for r in d] == [0.2, 0.1]
    assert 0.15 <= d[1]["residual"] / d[0]["residual"] <= 0.40
    assert 0.3 <= d[1]["err_value"] / d[0]["err_value"] <= 0.7


@pytest.mark.parametrize("argv", [
    ["validate", "--potential", "quartic"],
    ["validate", "--potential", "scaled_sin2", "--params", "-1"],
    ["validate", "--potential-csv", "/nonexistent/v.csv"],
    ["sweep", "--h-grid", "0.1:0.2"],
    ["sweep", "--h", "1.5"],
    ["sweep", "--routes", "exact"],
    ["constants", "--config", "/nonexistent/config.toml"],
    ["fit-decay", "/nonexistent/sweep.csv"],
])
def test_config_errors_exit_4(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 4 and err.startswith("fluxlab:")


def test_config_file_and_env(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "c.toml"
    cfg.write_text('potential = "scaled_sin2"\nparams = [2.0]\n')
    d = json.loads(run(capsys, "constants", "--config", str(cfg))[1])
    assert d["kappa"] == pytest.approx(np.sqrt(2))
    d = json.loads(run(capsys, "constants", "--config", str(cfg), "--potential", "sin2", "--params", "")[1])
    assert d["kappa"] == pytest.approx(1.0)
    monkeypatch.setenv("FLUXLAB_QUAD_TOL", "not-a-number")
    assert run(capsys, "constants")[0] == 4
    monkeypatch.setenv("FLUXLAB_QUAD_TOL", "1e-11")
    assert run(capsys, "constants", "--quad-tol", "1e-12")[0] == 0


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "fluxlab.cli", "validate", "--potential", "sin2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["passed"]
