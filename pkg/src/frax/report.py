"""Identity report record and its JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources

__all__ = ["IdentityReport", "make_report", "with_tol", "reports_to_json", "reports_to_csv", "load_schema",
           "timer"]


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one numerical identity check.

    ``gated`` is False for exploratory checks outside the stated hypotheses;
    those never affect exit status or acceptance.
    """

    identity_id: str
    params: dict
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    tol: float
    passed: bool
    notes: str = ""
    gated: bool = True
    runtime_ms: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "params": dict(self.params),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tol": self.tol,
            "pass": self.passed,
            "notes": self.notes,
            "gated": self.gated,
        }

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        if not self.gated:
            flag += " (exploratory)"
        return (f"{flag} {self.identity_id} {self.params} lhs={self.lhs:.12g} "
                f"rhs={self.rhs:.12g} abs_err={self.abs_err:.3g} tol={self.tol:.1g}")


def make_report(identity_id, params, lhs, rhs, tol, notes="", gated=True, runtime_ms=0.0):
    lhs = float(lhs)
    rhs = float(rhs)
    abs_err = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel_err = abs_err / scale if scale > 0 else 0.0
    passed = bool(abs_err <= tol or rel_err <= tol)
    return IdentityReport(identity_id, {k: float(v) for k, v in params.items()}, lhs, rhs,
                          abs_err, rel_err, float(tol), passed, notes, gated, runtime_ms)


def with_tol(report: IdentityReport, tol: float) -> IdentityReport:
    """Same comparison re-judged at a different tolerance."""
    return make_report(report.identity_id, report.params, report.lhs, report.rhs, tol, report.notes,
                       report.gated, report.runtime_ms)


@contextmanager
def timer():
    box = {}
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box["ms"] = 1e3 * (time.perf_counter() - t0)


def _fmt(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        if "e" not in text and "." not in text:
            text += ".0"
        return text
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_fmt(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _fmt(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def reports_to_json(reports, indent=2) -> str:
    """JSON array of reports with floats written to 17 significant digits.

    Runtimes are left out so that output is byte-stable across runs.
    """
    return _fmt([r.to_dict() for r in reports], indent, 0) + "\n"


def reports_to_csv(reports) -> str:
    """One row per report; params are flattened as key=value pairs separated by ';'."""
    cols = ["identity_id", "params", "lhs", "rhs", "abs_err", "rel_err", "tol", "pass", "gated", "notes"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)

    def num(v):
        return format(v, ".17g") if math.isfinite(v) else ""

    for r in reports:
        params = ";".join(f"{k}={num(v)}" for k, v in r.params.items())
        w.writerow([r.identity_id, params, num(r.lhs), num(r.rhs), num(r.abs_err), num(r.rel_err),
                    num(r.tol), str(r.passed).lower(), str(r.gated).lower(), r.notes])
    return buf.getvalue()


def load_schema() -> dict:
    text = resources.files("frax").joinpath("schemas/identity_report.schema.json").read_text()
    return json.loads(text)
