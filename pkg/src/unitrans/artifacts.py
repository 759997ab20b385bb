"""CSV, JSON and text-report writers shared by the command line."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np


def _fmt(v):
    # repr of a Python float is the shortest string that round-trips
    return repr(float(v))


def write_columns(path, header, columns):
    """One row per index; complex columns must be split by the caller."""
    columns = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([_fmt(v) for v in row])


def write_field(path, sample, complex_valued=None):
    """Long-format field CSV: axis0, axis1, value (re/im when complex)."""
    a0, a1 = sample.axes
    X, Y = np.meshgrid(sample.x_grid, sample.t_grid, indexing="ij")
    vals = np.asarray(sample.values)
    if complex_valued is None:
        complex_valued = np.iscomplexobj(vals)
    if complex_valued:
        write_columns(path, [a0, a1, "re", "im"],
                      [X.ravel(), Y.ravel(), vals.real.ravel(), vals.imag.ravel()])
    else:
        write_columns(path, [a0, a1, "q"], [X.ravel(), Y.ravel(), np.real(vals).ravel()])


def read_columns(path):
    """Header and float columns of a CSV written by :func:`write_columns`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return header, {h: data[:, i] for i, h in enumerate(header)}


def jsonable(obj):
    """Convert numpy scalars/arrays and complex numbers; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(float(obj.real)), "im": jsonable(float(obj.imag))}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""
    relation: str = "<"


@dataclass
class Report:
    """Accumulates verification outcomes; :attr:`ok` drives the exit status."""

    title: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def check(self, name, value, tolerance, detail="", at_least=False):
        value = float(value)
        passed = (value >= tolerance) if at_least else (value < tolerance)
        passed = passed and math.isfinite(value)
        self.checks.append(Check(name, value, float(tolerance), passed, detail,
                                 ">=" if at_least else "<"))
        return passed

    def note(self, text):
        self.notes.append(text)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def text(self):
        lines = [self.title, "=" * len(self.title)]
        lines.extend(self.notes)
        if self.notes:
            lines.append("")
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            line = f"[{mark}] {c.name}: {c.value:.3e} {c.relation} {c.tolerance:.1e}"
            if c.detail:
                line += f"  ({c.detail})"
            lines.append(line)
        if self.checks:
            n_pass = sum(c.passed for c in self.checks)
            lines.append("")
            lines.append(f"{n_pass}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"

    def as_dict(self):
        return {"title": self.title, "ok": self.ok, "notes": self.notes,
                "checks": [c.__dict__ for c in self.checks]}

    def write(self, out_dir, stem="report"):
        with open(os.path.join(out_dir, f"{stem}.txt"), "w") as fh:
            fh.write(self.text())
