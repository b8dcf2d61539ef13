import json
import subprocess
import sys

import pytest

from vortexlab import cli, io


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def call(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def error_doc(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


def test_profile_and_manifest_replay(workdir, capsys):
    code, out, _ = call(capsys, "profile", "--preset", "r2", "--ell", "1", "--out", "a")
    assert code == 0
    summary = json.loads(out)
    assert summary["el_residual"] < 1e-6
    meta = json.loads((workdir / "a.json").read_text())
    assert meta["mu_sq"] == 1.0
    doc = json.loads((workdir / "a.manifest.json").read_text())
    assert doc["tool"] == "vortexlab" and doc["config"]["subcommand"] == "profile"
    code, _, _ = call(capsys, "--manifest", "a.manifest.json", "--out", "b")
    assert code == 0
    assert (workdir / "a.csv").read_bytes() == (workdir / "b.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ["profile", "--preset", "moon"],
    ["profile", "--p", "0.5"],
    ["energy", "--p", "5"],
    ["profile", "--lambda", "-1"],
    ["reps", "--group", "u2", "--j", "3", "--m", "0"],
    ["--manifest", "missing.json"],
    [],
    ["profile", "--bogus"],
])
def test_validation_errors(workdir, capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2
    assert error_doc(err)["exit"] == 2


def test_solver_failure_exit_code(workdir, capsys):
    code, _, err = call(capsys, "profile", "--r-max", "6")
    assert code == 3
    assert error_doc(err)["error"] == "NoGroundState"


def test_invariant_violation_exit_code(workdir, capsys):
    code, _, err = call(capsys, "sweep", "--ell", "0,1", "--margin", "10", "--out", "s")
    assert code == 4
    assert error_doc(err)["exit"] == 4


def test_sweep(workdir, capsys):
    code, out, _ = call(capsys, "sweep", "--ell", "0,1,2,3", "--p-energy", "2",
                        "--beta-energy", "20", "--out", "s")
    assert code == 0
    header, rows = io.read_csv(workdir / "s.csv")
    assert header[:4] == ["mu_sq", "W", "I", "E"]
    w = [row[1] for row in rows]
    assert all(a > b for a, b in zip(w, w[1:]))


def test_weinstein_and_threshold(workdir, capsys):
    code, out, _ = call(capsys, "threshold", "--n", "2", "--p", "3", "--out", "t")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["threshold_norm"] - doc["Q_norm"]) < 1e-3 * doc["Q_norm"]


def test_axial_small(workdir, capsys):
    code, out, _ = call(capsys, "axial", "--nr", "48", "--ny", "96", "--R", "12", "--Y", "12",
                        "--binary", "--out", "ax")
    assert code == 0
    assert json.loads(out)["residual_norm"] < 1e-4
    assert (workdir / "ax.axv1").read_bytes()[:4] == b"AXV1"


def test_evolve_blowup(workdir, capsys):
    code, out, _ = call(capsys, "evolve", "--fraction", "1.2", "--gaussian-focus",
                        "--grid", "0.01", "--T", "1.0", "--out", "ev")
    assert code == 0
    verdict = json.loads((workdir / "ev.verdict.json").read_text())
    assert verdict["verdict"] == "BlowUp" and verdict["t_star"] > 0
    header, _ = io.read_csv(workdir / "ev.timeseries.csv")
    assert header == ["t", "mass", "energy", "grad_sq", "f", "fprime", "L4", "Linf"]


def test_reps_and_check_manifold(workdir, capsys):
    code, out, _ = call(capsys, "reps", "--group", "u2", "--j", "2")
    assert code == 0 and json.loads(out)
    code, out, _ = call(capsys, "check-manifold", "--preset", "h2")
    assert code == 0
    doc = json.loads(out)
    assert doc["integral_condition"] and doc["growth_condition"]


def test_console_script(workdir):
    proc = subprocess.run([sys.executable, "-m", "vortexlab.cli", "profile", "--p", "0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]


def test_evolve_scatter(workdir, capsys):
    code, out, _ = call(capsys, "evolve", "--mode", "scatter", "--fraction", "0.5", "--T", "16",
                        "--dt", "0.01", "--grid", "0.05", "--width", "2", "--out", "sc")
    assert code == 0
    doc = json.loads(out)
    assert doc["decay_ok"] and doc["increments_decreasing"]
    code, _, err = call(capsys, "evolve", "--mode", "scatter", "--T", "4")
    assert code == 2 and error_doc(err)["error"] == "ValidationError"
