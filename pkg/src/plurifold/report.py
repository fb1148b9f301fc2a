"""Verification reports: records, JSON/text serialization and the exit-code rule."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__

REPORT_SCHEMA = "plurifold-report/1"
STATUSES = ("pass", "fail", "info")


def jsonable(x):
    """Convert numpy values, complex numbers and tuples to plain JSON values.

    Complex numbers become ``[re, im]``; non-finite floats become ``None``.
    """
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(x.real), jsonable(x.imag)]
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


@dataclass
class CheckRecord:
    name: str
    anchor: str
    status: str
    residual: float | None
    tolerance: float | None
    witness: object = None
    slope: float | None = None
    expected_verdict: str | None = None
    verdict: str | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        self.residual = jsonable(self.residual)
        self.tolerance = jsonable(self.tolerance)
        self.slope = jsonable(self.slope)
        self.witness = jsonable(self.witness)
        self.details = jsonable(self.details)
        if self.status == "pass" and self.residual is not None and self.tolerance is not None:
            if not self.residual <= self.tolerance:
                raise ValueError(f"{self.name}: pass with residual above tolerance")
        if self.status == "info" and self.expected_verdict is None:
            raise ValueError(f"{self.name}: info checks need an expected verdict")

    @property
    def matches_expectation(self) -> bool:
        return self.status == "info" and self.verdict == self.expected_verdict

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "witness": self.witness,
            "slope": self.slope,
            "expected_verdict": self.expected_verdict,
            "verdict": self.verdict,
            "details": self.details,
        }


def threshold_check(name: str, anchor: str, residual: float, tolerance: float, extra_ok: bool = True,
                    **kw) -> CheckRecord:
    """``pass`` iff ``residual <= tolerance`` (and ``extra_ok``)."""
    ok = residual is not None and math.isfinite(residual) and residual <= tolerance and extra_ok
    return CheckRecord(name, anchor, "pass" if ok else "fail", residual, tolerance, **kw)


def info_check(name: str, anchor: str, expected: str, observed: str, residual=None, tolerance=None,
               **kw) -> CheckRecord:
    return CheckRecord(name, anchor, "info", residual, tolerance, expected_verdict=expected,
                       verdict=observed, **kw)


@dataclass
class Report:
    command: str
    scene_hash: str
    seed: int
    checks: list[CheckRecord] = field(default_factory=list)
    version: str = __version__
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def exit_code(self) -> int:
        return 0 if all(c.status != "fail" for c in self.checks) else 1

    def to_dict(self) -> dict:
        # timings are left out so that equal inputs give byte-identical JSON
        return {
            "schema": REPORT_SCHEMA,
            "tool_version": self.version,
            "command": self.command,
            "scene_hash": self.scene_hash,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
            "exit_code": self.exit_code,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"not a {REPORT_SCHEMA} document")
        checks = [CheckRecord(**c) for c in d["checks"]]
        return cls(d["command"], d["scene_hash"], d["seed"], checks, d["tool_version"])


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def from_json(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.3e}"
    return str(x)


def to_text(report: Report) -> str:
    lines = [f"plurifold {report.version}  {report.command}  scene {report.scene_hash[:12]}  seed {report.seed}"]
    head = f"{'status':6}  {'check':44}  {'residual':>10}  {'tol':>10}  {'slope':>6}  verdict"
    lines += [head, "-" * len(head)]
    for c in report.checks:
        verdict = "" if c.status != "info" else f"{c.verdict} (expected {c.expected_verdict})"
        slope = "-" if c.slope is None else f"{c.slope:.2f}"
        lines.append(f"{c.status:6}  {c.name[:44]:44}  {_fmt(c.residual):>10}  {_fmt(c.tolerance):>10}  "
                     f"{slope:>6}  {verdict}")
    for k, v in sorted(report.timings.items()):
        lines.append(f"time {k}: {v:.3f} s")
    lines.append(f"exit code {report.exit_code}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, mode: str = "json") -> str:
    if mode == "json":
        return to_json(report)
    if mode == "text":
        return to_text(report)
    raise ValueError(f"unknown output mode {mode!r}")


def error_document(kind: str, message: str, field_path: str | None = None, line: int | None = None) -> str:
    doc = {"schema": REPORT_SCHEMA, "error": {"kind": kind, "message": message,
                                              "field": field_path, "line": line}}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
