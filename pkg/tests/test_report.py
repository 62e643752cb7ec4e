from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdivlab.report import Check, CheckReport, envelope, to_csv, to_json


class TestCheck:
    def test_close_absolute(self):
        assert Check.close("a", 1.0 + 1e-9, 1.0, 1e-8).passed
        assert not Check.close("a", 1.1, 1.0, 1e-8).passed

    def test_close_relative(self):
        assert Check.close("r", 1001.0, 1000.0, 2e-3, rel=True).passed

    def test_inequalities(self):
        assert Check.leq("l", 1.0, 1.0).passed
        assert not Check.leq("l", 1.1, 1.0, 0.05).passed
        assert Check.geq("g", 0.99, 1.0, 0.01).passed

    def test_relaxed_close(self):
        c = Check.close("c", 1.01, 1.0, 1e-3)
        assert not c.passed
        assert c.relaxed(2e-2).passed
        assert c.relaxed(2e-2).tol == 2e-2

    def test_relaxed_never_tightens(self):
        c = Check.close("c", 1.0005, 1.0, 1e-3)
        assert c.relaxed(1e-6) is c

    def test_relaxed_leaves_boolean_checks(self):
        c = Check("b", False, 1.0, 2.0, 1e-3)
        assert c.relaxed(10.0) is c

    def test_dict_has_note_when_set(self):
        assert Check("n", True, note="x").to_dict()["note"] == "x"
        assert "note" not in Check("n", True).to_dict()


class TestCheckReport:
    def test_passed_and_failures(self):
        rep = CheckReport("r")
        rep.add(Check.close("ok", 1.0, 1.0, 0.0))
        rep.add(Check.leq("bad", 2.0, 1.0))
        assert not rep.passed
        assert [c.name for c in rep.failures()] == ["bad"]

    def test_extend_prefixes_and_keeps_kind(self):
        inner = CheckReport("inner", [Check.close("c", 1.01, 1.0, 1e-3)])
        outer = CheckReport("outer")
        outer.extend(inner)
        assert outer.checks[0].name == "inner.c"
        assert outer.relaxed(0.1).passed

    def test_relaxed_none_is_identity(self):
        rep = CheckReport("r")
        assert rep.relaxed(None) is rep


class TestSerialization:
    def test_json_round_trip(self):
        rep = CheckReport("r", [Check.close("c", np.float64(0.1), 0.1, 1e-12)],
                          {"arr": np.arange(3.0), "flag": np.bool_(True), "n": np.int64(4),
                           "big": math.inf, "pair": (1.0, 2.0)})
        doc = envelope("cmd", {"a": 1.5}, rep.results, rep.checks, "0.1.0")
        back = json.loads(to_json(doc))
        assert back["results"] == {"arr": [0.0, 1.0, 2.0], "flag": True, "n": 4,
                                   "big": "inf", "pair": [1.0, 2.0]}
        assert back["checks"][0]["pass"] is True
        assert back["version"] == "0.1.0"

    def test_json_is_deterministic(self):
        doc = envelope("cmd", {}, {"x": 0.1 + 0.2}, [], "0.1.0")
        assert to_json(doc) == to_json(doc)

    def test_csv_full_precision(self):
        text = to_csv(["x", "flag"], [(0.1 + 0.2, True), (1e-300, False)])
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["x", "flag"]
        assert float(rows[1][0]) == 0.1 + 0.2
        assert rows[1][1] == "true"
        assert rows[2][1] == "false"


@given(st.floats(allow_nan=False, allow_infinity=False))
@settings(max_examples=200, deadline=None)
def test_csv_float_round_trip(x):
    text = to_csv(["x"], [(x,)])
    assert float(text.splitlines()[1]) == x
