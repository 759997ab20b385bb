"""CSV, JSON and report writers."""

import json

import numpy as np

from unitrans.artifacts import Report, jsonable, read_columns, write_columns, write_json


def test_csv_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(7)
    v = rng.standard_normal(50) * 10.0 ** rng.integers(-300, 300, 50)
    write_columns(tmp_path / "c.csv", ["v", "w"], [v, np.float32(1.5) * np.ones(50)])
    header, cols = read_columns(tmp_path / "c.csv")
    assert header == ["v", "w"] and np.array_equal(cols["v"], v)


def test_jsonable_conversions(tmp_path):
    obj = {"c": 1 + 2j, "n": np.float64("nan"), "i": np.int64(3), "b": np.bool_(True),
           "a": np.array([1.0, np.inf]), 4: (np.complex128(1j),)}
    assert jsonable(obj) == {"c": {"re": 1.0, "im": 2.0}, "n": None, "i": 3, "b": True,
                             "a": [1.0, None], "4": [{"re": 0.0, "im": 1.0}]}
    write_json(tmp_path / "d.json", obj)
    assert json.loads((tmp_path / "d.json").read_text())["i"] == 3


def test_report_status_and_text(tmp_path):
    r = Report("title")
    r.note("a note")
    r.check("small", 1e-9, 1e-8)
    r.check("order", 2.0, 1.5, "observed", at_least=True)
    assert r.ok
    r.check("large", 1.0, 1e-3)
    assert not r.ok
    text = r.text()
    assert "[PASS] small" in text and "[FAIL] large" in text and "a note" in text
    r.write(str(tmp_path))
    assert (tmp_path / "report.txt").read_text() == text
    d = r.as_dict()
    assert d["ok"] is False and len(d["checks"]) == 3


def test_nan_check_fails():
    r = Report("t")
    r.check("nan", float("nan"), 1.0)
    assert not r.ok
