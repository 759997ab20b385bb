"""Configuration loading, defaults and the builders that turn a config into solver inputs."""

import json

import numpy as np
import pytest

from unitrans import ConfigError, load_config
from unitrans.config import (apply_tolerance_override, build_function, build_laplace,
                             build_potential, build_schrodinger, check_algebraic_preconditions,
                             grid)


def test_defaults_filled():
    doc = load_config()
    assert doc["schrodinger"]["bc_kind"] == "dirichlet"
    assert doc["schrodinger"]["x"] == {"start": 0.0, "stop": 10.0, "step": 0.1}
    assert doc["laplace"]["gamma1"] == -1.0
    assert doc["tolerances"]["unitarity"] == 1e-8
    assert doc["potential"]["kind"] == "zero"
    assert doc["figures"] is True
    assert "potential" not in doc["schrodinger"]


def test_dict_source_is_not_mutated():
    src = {"laplace": {"gamma1": -2.0}}
    doc = load_config(src)
    assert src == {"laplace": {"gamma1": -2.0}}
    assert doc["laplace"]["gamma1"] == -2.0 and doc["laplace"]["beta"] == 0.0


@pytest.mark.parametrize("bad", [
    {"unknown": 1},
    {"potential": {"kind": "square"}},
    {"schrodinger": {"bc_kind": "robin"}},
    {"tolerances": {"unitarity": -1.0}},
    {"laplace": {"x": {"start": 1.0, "stop": 6.0, "step": 0.1}}},
    {"schrodinger": {"t": {"start": 0.0, "stop": -1.0, "step": 0.1}}},
    {"oracle": {"h": 10.0}},
    {"schrodinger": {"variant": "full_line"}},
    {"potential": {"kind": "table"}},
    {"potential": {"kind": "table", "path": "/nonexistent/u.csv"}},
])
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        load_config(bad)


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(broken))


def test_relative_table_path(tmp_path):
    xs = np.linspace(0.0, 10.0, 201)
    (tmp_path / "u.csv").write_text(
        "x,u\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(xs, np.exp(-xs))))
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"potential": {"kind": "table", "path": "u.csv"}}))
    doc = load_config(str(cfg))
    pot = build_potential(doc["potential"])
    assert abs(pot.eval(np.array([1.0]))[0] - np.exp(-1.0)) < 1e-6


def test_algebraic_preconditions():
    with pytest.raises(ConfigError):
        check_algebraic_preconditions(load_config({"laplace": {"gamma1": 1.0}}))
    with pytest.raises(ConfigError):
        check_algebraic_preconditions(load_config({"laplace": {"gamma1": 0.0}}))
    with pytest.raises(ConfigError):
        check_algebraic_preconditions(load_config({"laplace": {"beta": 0.5}}))
    check_algebraic_preconditions(load_config())


def test_tolerance_override():
    doc = apply_tolerance_override(load_config(), 1e-3)
    assert doc["tolerances"]["unitarity"] == 1e-3
    assert doc["tolerances"]["convergence_order"] == 1.5
    with pytest.raises(ConfigError):
        apply_tolerance_override(load_config(), 0.0)
    assert apply_tolerance_override(load_config(), None)["tolerances"]["unitarity"] == 1e-8


def test_grid_includes_stop():
    g = grid({"start": 0.0, "stop": 1.0, "step": 0.1})
    assert len(g) == 11 and g[-1] == 1.0


def test_function_kinds():
    x = np.array([0.0, 1.0, 2.0])
    g = build_function({"kind": "gaussian", "amplitude": 2.0, "center": 1.0, "width": 1.0})
    assert abs(g(x)[1] - 2.0) < 1e-15
    e = build_function({"kind": "exp_decay", "amplitude": 1.0, "rate": 2.0}, complex_valued=False)
    assert np.allclose(e(x), np.exp(-2 * x))
    z = build_function({"kind": "zero"})
    assert not np.any(z(x))


@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
def test_compatible_boundary_data(bc):
    doc = load_config({"schrodinger": {"bc_kind": bc}})
    setup = build_schrodinger(doc)
    assert setup.data.compatibility_error < 1e-8


def test_shared_potential_and_override():
    doc = load_config({"potential": {"kind": "sech2"},
                       "laplace": {"potential": {"kind": "sech2", "scale": -0.1}}})
    assert build_schrodinger(doc).potential.name == "sech2"
    assert build_laplace(doc).potential.name == "sech2_scaled"
