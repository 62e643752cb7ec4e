"""Named verdicts and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np


def _clean(x: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into JSON friendly values."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return x


@dataclass
class Check:
    """One named verdict.

    ``value`` is what was measured, ``expected`` what it was compared
    against and ``tol`` the allowed discrepancy (or ``None`` for pure
    inequality checks, where ``expected`` is the bound).
    """

    name: str
    passed: bool
    value: Any = None
    expected: Any = None
    tol: float | None = None
    note: str = ""
    kind: str = field(default="", repr=False, compare=False)

    def to_dict(self) -> dict:
        d = {"name": self.name, "pass": bool(self.passed), "value": _clean(self.value),
             "expected": _clean(self.expected), "tol": _clean(self.tol)}
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def close(cls, name: str, value: float, expected: float, tol: float, rel: bool = False,
              note: str = "") -> "Check":
        err = abs(value - expected)
        if rel:
            err /= max(abs(expected), 1e-300)
        return cls(name, bool(err <= tol), value, expected, tol, note, "close-rel" if rel else "close")

    @classmethod
    def leq(cls, name: str, value: float, bound: float, slack: float = 0.0, note: str = "") -> "Check":
        return cls(name, bool(value <= bound + slack), value, bound, slack, note, "leq")

    @classmethod
    def geq(cls, name: str, value: float, bound: float, slack: float = 0.0, note: str = "") -> "Check":
        return cls(name, bool(value >= bound - slack), value, bound, slack, note, "geq")

    def relaxed(self, floor: float) -> "Check":
        """Re-judge a tolerance comparison with ``tol = max(tol, floor)``.

        Boolean checks (no recorded comparison kind) are returned unchanged.
        """
        if not self.kind or self.tol is None or floor <= self.tol:
            return self
        if self.kind.startswith("close"):
            return Check.close(self.name, self.value, self.expected, floor,
                               rel=self.kind == "close-rel", note=self.note)
        if self.kind == "leq":
            return Check.leq(self.name, self.value, self.expected, floor, self.note)
        return Check.geq(self.name, self.value, self.expected, floor, self.note)


@dataclass
class CheckReport:
    """A bundle of checks plus free-form numerical results."""

    name: str
    checks: list[Check] = field(default_factory=list)
    results: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "CheckReport", prefix: str | None = None) -> None:
        p = f"{prefix or other.name}."
        for c in other.checks:
            self.checks.append(Check(p + c.name, c.passed, c.value, c.expected, c.tol, c.note, c.kind))

    def relaxed(self, floor: float | None) -> "CheckReport":
        if floor is None:
            return self
        return CheckReport(self.name, [c.relaxed(floor) for c in self.checks], self.results)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed,
                "results": _clean(self.results),
                "checks": [c.to_dict() for c in self.checks]}


def envelope(command: str, params: dict, results: dict, checks: Iterable[Check],
             version: str) -> dict:
    """Top-level JSON document emitted by the CLI."""
    return {"command": command, "params": _clean(params), "results": _clean(results),
            "checks": [c.to_dict() for c in checks], "version": version}


def to_json(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=False, allow_nan=False) + "\n"


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if v is None:
        return ""
    return str(v)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with one header row and full precision, locale independent numbers."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()
