"""Run configuration: a JSON document validated against a published schema.

Every numeric default lives in :data:`SCHEMA` so a report can be reproduced
from the filled-in configuration alone.
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass

import jsonschema
import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError
from .potentials import (LaplaceData, SchrodingerData, Sech2Params, from_callable, from_table,
                         make_sech2, read_csv_table, zero_potential)


def _grid(start, stop, step):
    return {"type": "object", "additionalProperties": False,
            "properties": {"start": {"type": "number", "default": start},
                           "stop": {"type": "number", "default": stop},
                           "step": {"type": "number", "exclusiveMinimum": 0, "default": step}},
            "default": {}}


def _positive(value):
    return {"type": "number", "exclusiveMinimum": 0, "default": value}


_FUNCTION = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["zero", "gaussian", "exp_decay", "compatible_decay", "table"]},
        "amplitude": {"type": "number", "default": 1.0},
        "center": {"type": "number", "default": 0.0},
        "width": _positive(1.0),
        "rate": {"type": "number", "minimum": 0, "default": 1.0},
        "path": {"type": "string"},
    },
    "required": ["kind"],
}

_POTENTIAL = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["zero", "sech2", "gaussian", "table"], "default": "zero"},
        "domain": {"enum": ["half_line", "full_line"], "default": "half_line"},
        "p": _positive(1.0),
        "x0": _positive(2.0),
        "scale": {"type": "number", "default": 1.0},
        "amplitude": {"type": "number", "default": 1.0},
        "center": {"type": "number", "default": 0.0},
        "width": _positive(1.0),
        "path": {"type": "string"},
    },
    "default": {},
}

# per-problem override of the shared potential; absent means "use the shared one"
_POTENTIAL_OVERRIDE = {k: v for k, v in _POTENTIAL.items() if k != "default"}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "unitrans run configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "problem": {"enum": ["schrodinger", "laplace", "scattering", "completeness", "verify"]},
        "potential": _POTENTIAL,
        "schrodinger": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "potential": _POTENTIAL_OVERRIDE,
                "bc_kind": {"enum": ["dirichlet", "neumann"], "default": "dirichlet"},
                "variant": {"enum": ["half_line", "full_line"], "default": "half_line"},
                "representation": {"enum": ["direct", "deformed", "longtime", "sine"],
                                   "default": "direct"},
                "q0": {**_FUNCTION, "default": {"kind": "gaussian", "center": 2.5}},
                "boundary": {**_FUNCTION, "default": {"kind": "compatible_decay"}},
                "x": _grid(0.0, 10.0, 0.1),
                "t": _grid(0.0, 1.0, 0.05),
                "cutoff": {"type": ["number", "null"], "exclusiveMinimum": 0, "default": None},
                "time_step": _positive(0.02),
                "compare": {"type": "array", "default": [],
                            "items": {"enum": ["oracle", "classical", "representations"]}},
            },
            "default": {},
        },
        "laplace": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "potential": _POTENTIAL_OVERRIDE,
                "f": {**_FUNCTION, "default": {"kind": "gaussian", "center": 3.0}},
                "g": {**_FUNCTION, "default": {"kind": "gaussian", "center": 3.0,
                                               "amplitude": 0.5}},
                "beta": {"type": "number", "default": 0.0},
                "gamma1": {"type": "number", "default": -1.0},
                "gamma2": {"type": "number", "default": 0.0},
                "x": _grid(0.0, 6.0, 0.1),
                "y": _grid(0.0, 6.0, 0.1),
                "cutoff": _positive(40.0),
                "kappa": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                          "default": [0.1, 0.3, 0.7, 1.3, 2.0, 3.1, 5.0]},
                "compare": {"type": "array", "default": [],
                            "items": {"enum": ["oracle"]}},
            },
            "default": {},
        },
        "scattering": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "k": _grid(0.1, 10.0, 0.1),
                "x": _grid(0.0, 10.0, 0.5),
                "wronskian_x": {"type": "array", "items": {"type": "number"},
                                "default": [0.5, 3.0, 7.0]},
            },
            "default": {},
        },
        "completeness": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "test_fn": {**_FUNCTION, "default": {"kind": "gaussian", "center": 4.0}},
                "x": _grid(0.0, 10.0, 0.1),
                "variant": {"enum": ["half_line", "full_line", None], "default": None},
            },
            "default": {},
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dx": _positive(0.01),
                "dt": _positive(1e-3),
                "x_max": _positive(60.0),
                "h": _positive(0.05),
                "uniform_extent": _positive(8.0),
                "far_extent": _positive(20000.0),
                "refinements": {"type": "integer", "minimum": 2, "default": 3},
            },
            "default": {},
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "unitarity": _positive(1e-8),
                "closed_form": _positive(1e-6),
                "completeness": _positive(1e-3),
                "completeness_free": _positive(1e-4),
                "classical": _positive(1e-5),
                "oracle_schrodinger": _positive(1e-3),
                "representations": _positive(1e-4),
                "vanishing_terms": _positive(1e-3),
                "oracle_laplace": _positive(1e-2),
                "imaginary_part": _positive(1e-8),
                "rh_algebraic": _positive(1e-6),
                "rh_oracle": _positive(1e-2),
                "leakage": _positive(1e-6),
                "convergence_order": _positive(1.5),
            },
            "default": {},
        },
        "figures": {"type": "boolean", "default": True},
    },
}


def _fill_defaults(validator_class):
    """Validator that writes schema defaults into the instance while checking it."""
    validate_properties = validator_class.VALIDATORS["properties"]

    def set_defaults(validator, properties, instance, schema):
        if isinstance(instance, dict):
            for name, sub in properties.items():
                if "default" in sub and name not in instance:
                    instance[name] = copy.deepcopy(sub["default"])
        yield from validate_properties(validator, properties, instance, schema)

    return jsonschema.validators.extend(validator_class, {"properties": set_defaults})


_Validator = _fill_defaults(jsonschema.Draft202012Validator)


def load_config(source=None):
    """Validated configuration with defaults filled in.

    ``source`` is a path, a dict, or None for the defaults alone.
    """
    if source is None:
        doc = {}
    elif isinstance(source, dict):
        doc = copy.deepcopy(source)
    else:
        try:
            with open(source) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {source} is not valid JSON: {exc}") from exc
        base = os.path.dirname(os.path.abspath(source))
        _resolve_paths(doc, base)
    errors = sorted(_Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        where = "/".join(map(str, e.path)) or "<root>"
        raise ConfigError(f"config invalid at {where}: {e.message}")
    # a second pass fills defaults nested inside defaults
    _Validator(SCHEMA).validate(doc)
    _check_semantics(doc)
    return doc


def _resolve_paths(node, base):
    if isinstance(node, dict):
        for key, val in node.items():
            if key == "path" and isinstance(val, str) and not os.path.isabs(val):
                node[key] = os.path.join(base, val)
            else:
                _resolve_paths(val, base)
    elif isinstance(node, list):
        for item in node:
            _resolve_paths(item, base)


def _check_semantics(doc):
    for section in ("potential", "schrodinger", "laplace", "completeness"):
        _check_files(doc.get(section, {}), section)
    for name in ("x", "y"):
        gr = doc["laplace"][name]
        if gr["start"] != 0.0 or gr["stop"] < gr["start"]:
            raise ConfigError(f"laplace.{name} must start at 0 and increase")
    for name in ("x", "t"):
        gr = doc["schrodinger"][name]
        if gr["start"] < 0 or gr["stop"] < gr["start"]:
            raise ConfigError(f"schrodinger.{name} must be a nonnegative increasing range")
    if doc["oracle"]["h"] >= doc["oracle"]["uniform_extent"]:
        raise ConfigError("oracle.h must be smaller than oracle.uniform_extent")
    pot = schrodinger_potential_spec(doc)
    if doc["schrodinger"]["variant"] == "full_line" and pot["domain"] != "full_line":
        raise ConfigError("the full-line variant needs a full-line potential")


def _check_files(node, where):
    if isinstance(node, dict):
        if "kind" in node and node["kind"] == "table":
            path = node.get("path")
            if not path:
                raise ConfigError(f"{where}: table entries need a path")
            if not os.path.isfile(path):
                raise ConfigError(f"{where}: file {path} does not exist")
        for key, val in node.items():
            _check_files(val, f"{where}.{key}")


def check_algebraic_preconditions(doc):
    """The algebraic Laplace path needs beta = 0 and gamma1 < 0."""
    lap = doc["laplace"]
    if lap["gamma1"] >= 0:
        raise ConfigError(
            f"gamma1 = {lap['gamma1']} but the algebraic path needs gamma1 < 0 "
            "(k = -gamma1 would be a pole on the integration contour)")
    if lap["beta"] != 0:
        raise ConfigError("the algebraic path needs beta = 0; use the oracle for beta != 0")


# -- builders -----------------------------------------------------------------------

def grid(spec):
    n = int(round((spec["stop"] - spec["start"]) / spec["step"])) + 1
    return np.linspace(spec["start"], spec["start"] + (n - 1) * spec["step"], max(n, 1))


def schrodinger_potential_spec(doc):
    return doc["schrodinger"].get("potential") or doc["potential"]


def laplace_potential_spec(doc):
    return doc["laplace"].get("potential") or doc["potential"]


def build_potential(spec):
    spec = _with_defaults(spec, _POTENTIAL)
    kind, domain = spec.get("kind", "zero"), spec.get("domain", "half_line")
    if kind == "zero":
        return zero_potential(domain)
    if kind == "sech2":
        return make_sech2(Sech2Params(spec["p"], spec["x0"]), domain, scale=spec["scale"])
    if kind == "gaussian":
        A, c, w = spec["amplitude"], spec["center"], spec["width"]
        return from_callable(lambda s: A * np.exp(-((s - c) / w) ** 2), domain, "gaussian")
    x, u = read_csv_table(spec["path"])
    return from_table(x, u, domain)


def _table_function(path):
    cols = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, skiprows=_header_rows(path))
    s = cols[:, 0]
    v = cols[:, 1] + (1j * cols[:, 2] if cols.shape[1] > 2 else 0)
    re, im = CubicSpline(s, v.real), CubicSpline(s, v.imag)
    lo, hi = s[0], s[-1]

    def fn(z):
        z = np.asarray(z, dtype=float)
        inside = (z >= lo) & (z <= hi)
        zc = np.clip(z, lo, hi)
        return np.where(inside, re(zc) + 1j * im(zc), 0.0)

    return fn


def _header_rows(path):
    with open(path) as fh:
        first = fh.readline().split(",")[0].strip()
    try:
        float(first)
        return 0
    except ValueError:
        return 1


def _with_defaults(spec, schema):
    filled = {k: v["default"] for k, v in schema["properties"].items() if "default" in v}
    return {**filled, **spec}


def build_function(spec, complex_valued=True):
    spec = _with_defaults(spec, _FUNCTION)
    kind = spec["kind"]
    A, c, w, r = spec["amplitude"], spec["center"], spec["width"], spec["rate"]
    if kind == "zero":
        fn = lambda s: np.zeros_like(np.asarray(s, dtype=float))
    elif kind == "gaussian":
        fn = lambda s: A * np.exp(-((np.asarray(s, dtype=float) - c) / w) ** 2)
    elif kind == "exp_decay":
        fn = lambda s: A * np.exp(-r * np.asarray(s, dtype=float))
    elif kind == "table":
        fn = _table_function(spec["path"])
    else:
        raise ConfigError("compatible_decay is only valid for the Schrodinger boundary datum")
    if complex_valued:
        return lambda s: np.asarray(fn(s), dtype=complex)
    return lambda s: np.real(np.asarray(fn(s)))


@dataclass
class SchrodingerSetup:
    potential: object
    data: SchrodingerData
    x: np.ndarray
    t: np.ndarray


def build_schrodinger(doc):
    sec = doc["schrodinger"]
    q0 = build_function(sec["q0"])
    bspec = sec["boundary"]
    if bspec["kind"] == "compatible_decay":
        if sec["bc_kind"] == "dirichlet":
            amp = complex(q0(np.zeros(1))[0])
        elif sec["q0"]["kind"] == "gaussian":
            amp = complex(_exact_gaussian_slope(sec["q0"]))
        else:
            h = 1e-4
            amp = complex((-3 * q0(np.zeros(1))[0] + 4 * q0(np.array([h]))[0]
                           - q0(np.array([2 * h]))[0]) / (2 * h))
        rate = bspec["rate"]
        bfn = lambda s: amp * np.exp(-rate * np.asarray(s, dtype=float))
    else:
        bfn = build_function(bspec)
    if sec["bc_kind"] == "dirichlet":
        data = SchrodingerData(q0, "dirichlet", g0=bfn)
    else:
        data = SchrodingerData(q0, "neumann", g1=bfn)
    pot = build_potential(schrodinger_potential_spec(doc))
    return SchrodingerSetup(pot, data, grid(sec["x"]), grid(sec["t"]))


def _exact_gaussian_slope(spec):
    A, c, w = spec["amplitude"], spec["center"], spec["width"]
    return A * 2 * c / w**2 * np.exp(-(c / w) ** 2)


@dataclass
class LaplaceSetup:
    potential: object
    data: LaplaceData
    x: np.ndarray
    y: np.ndarray


def build_laplace(doc):
    sec = doc["laplace"]
    f = build_function(sec["f"], complex_valued=False)
    g = build_function(sec["g"], complex_valued=False)
    data = LaplaceData(f, g, sec["beta"], sec["gamma1"], sec["gamma2"])
    pot = build_potential(laplace_potential_spec(doc))
    return LaplaceSetup(pot, data, grid(sec["x"]), grid(sec["y"]))


def apply_tolerance_override(doc, tol):
    """``--tol`` replaces every verification tolerance except the convergence order."""
    if tol is None:
        return doc
    if not tol > 0:
        raise ConfigError("--tol must be positive")
    for key in doc["tolerances"]:
        if key != "convergence_order":
            doc["tolerances"][key] = float(tol)
    return doc
