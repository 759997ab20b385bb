"""Command-line runs on small grids: exit status, artifacts and reproducibility."""

import json
import subprocess
import sys

import numpy as np
import pytest

from unitrans import JostSolver, Sech2Params, make_sech2
from unitrans.artifacts import read_columns
from unitrans.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, EXIT_SOLVER, main

SCATTERING = {"potential": {"kind": "sech2", "domain": "full_line"},
              "scattering": {"k": {"start": 0.5, "stop": 5.0, "step": 0.5},
                             "x": {"start": 0.0, "stop": 4.0, "step": 1.0}},
              "completeness": {"x": {"start": 0.0, "stop": 8.0, "step": 0.5}}}
SCHRODINGER = {"schrodinger": {"x": {"start": 0.0, "stop": 6.0, "step": 0.5},
                               "t": {"start": 0.0, "stop": 0.5, "step": 0.25}},
               "oracle": {"dx": 0.02, "dt": 0.002, "x_max": 40.0}}
LAPLACE = {"potential": {"kind": "sech2", "scale": -0.1},
           "laplace": {"x": {"start": 0.0, "stop": 4.0, "step": 0.5},
                       "y": {"start": 0.0, "stop": 4.0, "step": 0.5}, "kappa": [0.5, 1.0, 2.0]},
           "oracle": {"h": 0.1, "uniform_extent": 6.0, "far_extent": 200.0}}


def _config(tmp_path, doc, name="run.json", **extra):
    path = tmp_path / name
    path.write_text(json.dumps({**doc, **extra}))
    return str(path)


def _run(tmp_path, args, doc, out="out", **extra):
    cfg = _config(tmp_path, doc, **extra)
    return main(args + ["--config", cfg, "--out", str(tmp_path / out)]), tmp_path / out


def test_scattering_artifacts_round_trip(tmp_path, capsys):
    code, out = _run(tmp_path, ["scattering"], SCATTERING)
    assert code == EXIT_OK
    assert "[PASS]" in capsys.readouterr().out
    header, cols = read_columns(out / "scattering.csv")
    assert header[:5] == ["k", "a_re", "a_im", "b_re", "b_im"]
    J = JostSolver(make_sech2(Sech2Params(1.0, 2.0), "full_line"))
    a = J.a(cols["k"])
    assert np.array_equal(cols["a_re"], a.real) and np.array_equal(cols["a_im"], a.imag)
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["diagnostics"]["unitarity"] < 1e-8
    assert diag["report"]["ok"] is True
    assert (out / "report.txt").read_text().startswith("Scattering data")
    assert (out / "scattering.png").is_file() and (out / "checks.png").is_file()
    assert json.loads((out / "config.json").read_text())["potential"]["kind"] == "sech2"


def test_runs_are_bit_identical(tmp_path):
    _, a = _run(tmp_path, ["scattering"], SCATTERING, out="a", figures=False)
    _, b = _run(tmp_path, ["scattering"], SCATTERING, out="b", figures=False)
    for name in ("scattering.csv", "bound_states.csv", "diagnostics.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert not (a / "scattering.png").exists()


def test_tolerance_override_fails_run(tmp_path, capsys):
    code, out = _run(tmp_path, ["scattering", "--tol", "1e-30"], SCATTERING, figures=False)
    assert code == EXIT_FAILED
    assert "[FAIL]" in (out / "report.txt").read_text()


def test_configuration_errors(tmp_path, capsys):
    bad = {**LAPLACE, "laplace": {**LAPLACE["laplace"], "gamma1": 1.0}}
    assert _run(tmp_path, ["solve", "laplace"], bad)[0] == EXIT_CONFIG
    assert "gamma1" in capsys.readouterr().err
    assert _run(tmp_path, ["laplace", "rh-jump"], bad)[0] == EXIT_CONFIG
    assert _run(tmp_path, ["scattering"], {"bogus": 1})[0] == EXIT_CONFIG
    assert main(["scattering", "--config", str(tmp_path / "none.json"),
                 "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    assert _run(tmp_path, ["solve", "laplace", "--compare", "classical"], LAPLACE)[0] == EXIT_CONFIG
    assert _run(tmp_path, ["scattering", "--tol", "-1"], SCATTERING)[0] == EXIT_CONFIG


def test_solver_error_exit(tmp_path, capsys):
    attractive = {**LAPLACE, "potential": {"kind": "sech2"}}
    assert _run(tmp_path, ["solve", "laplace"], attractive)[0] == EXIT_SOLVER
    assert "BoundStatePresent" in capsys.readouterr().err


def test_solve_schrodinger_with_comparisons(tmp_path):
    code, out = _run(tmp_path, ["solve", "schrodinger", "--compare", "classical",
                                "--compare", "oracle"], SCHRODINGER)
    assert code == EXIT_OK
    header, cols = read_columns(out / "field.csv")
    assert header == ["x", "t", "re", "im"]
    assert len(cols["x"]) == 13 * 3
    assert (out / "field.png").is_file()


def test_laplace_solve_oracle_and_jump(tmp_path):
    code, out = _run(tmp_path, ["solve", "laplace", "--compare", "oracle"], LAPLACE, out="s")
    assert code == EXIT_OK
    header, cols = read_columns(out / "field.csv")
    assert header == ["x", "y", "q"] and len(cols["q"]) == 81
    code, out = _run(tmp_path, ["laplace", "rh-jump"], LAPLACE, out="j")
    assert code == EXIT_OK
    _, cols = read_columns(out / "rh_jump.csv")
    assert np.max(cols["residual"]) < 1e-6
    code, out = _run(tmp_path, ["oracle", "laplace"], LAPLACE, out="o")
    assert code == EXIT_OK
    assert (out / "traces_bottom.csv").is_file() and (out / "traces_left.csv").is_file()


def test_oracle_schrodinger(tmp_path):
    code, out = _run(tmp_path, ["oracle", "schrodinger"], SCHRODINGER, figures=False)
    assert code == EXIT_OK
    header, cols = read_columns(out / "traces.csv")
    assert header == ["t", "q_re", "q_im", "qx_re", "qx_im"]
    # Dirichlet trace reproduces the compatible boundary datum q0(0) exp(-t)
    q00 = np.exp(-2.5**2)
    assert np.max(np.abs(cols["q_re"] - q00 * np.exp(-cols["t"]))) < 1e-15


@pytest.mark.parametrize("suite", ["unitarity", "completeness"])
def test_verify_suites(tmp_path, suite):
    code, out = _run(tmp_path, ["verify", suite], SCATTERING, figures=False)
    assert code == EXIT_OK
    assert json.loads((out / "diagnostics.json").read_text())


def test_module_entry_point(tmp_path):
    cfg = _config(tmp_path, SCATTERING, figures=False)
    r = subprocess.run([sys.executable, "-m", "unitrans", "scattering", "--config", cfg,
                        "--out", str(tmp_path / "m")], capture_output=True, text=True)
    assert r.returncode == 0 and "checks passed" in r.stdout
    h = subprocess.run([sys.executable, "-m", "unitrans", "--help"], capture_output=True, text=True)
    assert h.returncode == 0 and "verify" in h.stdout
