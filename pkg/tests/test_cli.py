import io
import json
import subprocess
import sys

import pytest

from mu_domains.cli import main

EXAMPLE = {"domain": "tetra", "lambda0": [0.6, 0], "point": [[0.3, 0], [0, 0], [0.2, 0]]}


def run_cli(monkeypatch, capsys, command, doc, *flags):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code = main([command, *flags])
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.mark.parametrize(
    "point, verdict, code",
    [
        ([[0, 0], [0, 0], [0, 0]], "interior", 0),
        ([[1, 0], [0, 0], [0, 0]], "boundary", 1),
        ([[1.2, 0], [0, 0], [0, 0]], "exterior", 2),
    ],
)
def test_membership_tetra(monkeypatch, capsys, point, verdict, code):
    got, out = run_cli(monkeypatch, capsys, "membership", {"domain": "tetra", "point": point})
    assert got == code
    assert out["overall"] == verdict
    assert {c["id"] for c in out["criteria"]} >= {"2", "6", "9"}


def test_membership_g2_reports_beta(monkeypatch, capsys):
    code, out = run_cli(monkeypatch, capsys, "membership", {"domain": "g2", "point": [[1, 0], [0.25, 0]]})
    assert code == 0 and out["overall"] == "interior"
    assert out["beta"][0][0] == pytest.approx(0.8, abs=1e-12)


def test_feasibility(monkeypatch, capsys):
    code, out = run_cli(monkeypatch, capsys, "feasibility", EXAMPLE)
    assert code == 0 and out["feasible"] == "feasible"
    assert out["lempert"] == pytest.approx(0.5)
    code, out = run_cli(monkeypatch, capsys, "feasibility", dict(EXAMPLE, lambda0=[0.4, 0]))
    assert code == 2 and out["feasible"] == "infeasible"


@pytest.mark.parametrize(
    "doc",
    [
        dict(EXAMPLE, lambda0=[0, 0]),
        dict(EXAMPLE, lambda0=[1, 0]),
        dict(EXAMPLE, point=[[0.3, 0], [0, 0]]),
        dict(EXAMPLE, point=[[0.3, 0, 1], [0, 0], [0, 0]]),
        dict(EXAMPLE, domain="bidisc"),
        {"domain": "tetra", "point": [[0, 0], [0, 0], [0, 0]]},
        "not json",
        "[1, 2]",
    ],
)
def test_malformed_feasibility_input(monkeypatch, capsys, doc):
    code, out = run_cli(monkeypatch, capsys, "feasibility", doc)
    assert code == 64
    assert out["error"] == "malformed-input"


def test_lempert(monkeypatch, capsys):
    code, out = run_cli(monkeypatch, capsys, "lempert", {"domain": "tetra", "point": [[0, 0], [0, 0], [0, 0]]})
    assert code == 0 and out["lempert"] == 0.0
    code, out = run_cli(monkeypatch, capsys, "lempert", {"domain": "g2", "point": [[1, 0], [0.25, 0]]})
    assert out["lempert"] == pytest.approx(0.5, abs=1e-12)
    code, out = run_cli(monkeypatch, capsys, "lempert", {"domain": "g2", "point": [[3, 0], [0, 0]]})
    assert code == 2 and out["error"] == "OutsideDomain"


def test_interpolate_then_verify_round_trip(monkeypatch, capsys, tmp_path):
    code, built = run_cli(monkeypatch, capsys, "interpolate", EXAMPLE)
    assert code == 0 and built["report"]["verified"]
    assert built["witness"]["verified"]
    path = tmp_path / "disc.json"
    path.write_text(json.dumps(built))
    code = main(["verify", "--input", str(path)])
    checked = json.loads(capsys.readouterr().out)
    assert code == 0
    assert checked["report"] == built["report"]


def test_interpolate_g2_and_infeasible(monkeypatch, capsys):
    doc = {"domain": "g2", "lambda0": [0.6, 0], "point": [[1, 0], [0.25, 0]]}
    code, out = run_cli(monkeypatch, capsys, "interpolate", doc)
    assert code == 0 and out["report"]["verified"] and "witness" not in out
    code, out = run_cli(monkeypatch, capsys, "interpolate", dict(doc, lambda0=[0.4, 0]))
    assert code == 2 and out["error"] == "InfeasibleProblem"


def test_verify_rejects_bad_disc(monkeypatch, capsys):
    lam = {"type": "lambda"}
    doc = {"domain": "tetra", "lambda0": [0.5, 0], "point": [[0.5, 0], [0.5, 0], [0.5, 0]],
           "disc": {"components": [lam, lam, lam]}}
    code, out = run_cli(monkeypatch, capsys, "verify", doc)
    assert code == 2 and not out["report"]["verified"]
    code, out = run_cli(monkeypatch, capsys, "verify", dict(doc, disc={"components": [{"type": "x"}]}))
    assert code == 64


def test_sweep(monkeypatch, capsys):
    code, out = run_cli(monkeypatch, capsys, "sweep", {"seed": 42, "n": 1000})
    assert code == 0 and out["healthy"]
    assert out["summary"]["genuine_disagreements"] == 0
    assert out["config"]["seed"] == 42
    code, out = run_cli(monkeypatch, capsys, "sweep", {"n": 500, "mutate": "8"})
    assert code == 1 and not out["healthy"]
    code, out = run_cli(monkeypatch, capsys, "sweep", {"n": "many"})
    assert code == 64


def test_sweep_without_input_uses_flags(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(""))
    code = main(["sweep", "--seed", "7", "--grid", "256"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["config"]["seed"] == 7 and out["config"]["torus_grid"] == 256


def test_tol_flag_and_env(monkeypatch, capsys):
    near = {"domain": "tetra", "point": [[0.95, 0], [0, 0], [0, 0]]}
    code, out = run_cli(monkeypatch, capsys, "membership", near, "--tol", "0.1")
    assert code == 1
    monkeypatch.setenv("MU_DOMAINS_TOL", "0.1")
    code, out = run_cli(monkeypatch, capsys, "membership", near)
    assert code == 1
    code, out = run_cli(monkeypatch, capsys, "membership", near, "--tol", "1e-9")
    assert code == 0


def test_output_file(monkeypatch, capsys, tmp_path):
    target = tmp_path / "out.json"
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(EXAMPLE)))
    assert main(["feasibility", "--output", str(target)]) == 0
    assert json.loads(target.read_text())["feasible"] == "feasible"


def test_outputs_round_trip_floats(monkeypatch, capsys):
    doc = {"domain": "tetra", "point": [[0.1 + 1e-17, 0], [1 / 3, 0.2], [0.01, -0.03]]}
    _, out = run_cli(monkeypatch, capsys, "membership", doc)
    assert out["point"][1] == [1 / 3, 0.2]


def test_usage_errors_exit_64():
    proc = subprocess.run([sys.executable, "-m", "mu_domains", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 64


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mu_domains", "lempert"], input=json.dumps(
        {"domain": "tetra", "point": [[0.3, 0], [0, 0], [0.2, 0]]}), capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["lempert"] == pytest.approx(0.5)
