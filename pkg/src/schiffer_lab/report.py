"""Verification reports and their JSON/CSV serialisation.

Reports are deterministic: keys are sorted, arrays are written as lists of
floats, and wall-clock timings go to a separate ``<task>.timings.json`` file.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

# statuses
VERIFIED = "verified"
FAILED = "failed"
DEGENERATE = "expected_degeneracy"


@dataclass
class Step:
    name: str
    passed: bool
    computed: object = None
    expected: object = None
    source: str = ""        # where the expected value comes from
    tolerance: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "computed": _clean(self.computed),
            "expected": _clean(self.expected),
            "source": self.source,
            "tolerance": self.tolerance,
            "note": self.note,
        }


@dataclass
class VerificationReport:
    task: str
    curve: dict
    steps: list[Step] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)     # name -> (header, rows)
    status_override: str | None = None
    summary: str = ""
    timings: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)  # in-memory only, for figures

    def add(self, name: str, passed: bool, **kw) -> Step:
        step = Step(name, bool(passed), **kw)
        self.steps.append(step)
        return step

    def check(self, name: str, computed: float, expected: float, tol: float, *, relative: bool = False,
              source: str = "", note: str = "") -> Step:
        err = abs(computed - expected)
        if relative:
            err /= max(abs(expected), np.finfo(float).tiny)
        return self.add(name, bool(err <= tol), computed=computed, expected=expected,
                        source=source, tolerance=tol, note=note or f"{'relative' if relative else 'absolute'} error {err:.3e}")

    def bound(self, name: str, computed: float, limit: float, *, upper: bool = True, source: str = "",
              note: str = "") -> Step:
        ok = computed <= limit if upper else computed >= limit
        return self.add(name, bool(ok), computed=computed, expected=("<= " if upper else ">= ") + repr(float(limit)),
                        source=source, tolerance=None, note=note)

    @property
    def overall_verdict(self) -> bool:
        return all(s.passed for s in self.steps)

    @property
    def status(self) -> str:
        if not self.overall_verdict:
            return FAILED
        return self.status_override or VERIFIED

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "task": self.task,
            "curve": _clean(self.curve),
            "status": self.status,
            "overall_verdict": self.overall_verdict,
            "summary": self.summary,
            "steps": [s.to_dict() for s in self.steps],
            "metrics": _clean(self.metrics),
            "warnings": list(self.warnings),
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _clean(obj):
    """Convert numpy and complex values to JSON-safe types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(float(obj.real)), "im": _clean(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def emit_report(report: VerificationReport, out_dir: str | Path, fmt: str = "json") -> list[Path]:
    """Write the report (JSON always), plot-ready CSV series and the timings sidecar.

    ``fmt = "csv"`` additionally writes the steps table as CSV.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    main = out / f"{report.task}.json"
    _write(main, report.to_json_text())
    written.append(main)
    for name, (header, rows) in sorted(report.series.items()):
        p = out / f"{report.task}_{name}.csv"
        written.append(write_csv(p, header, rows))
    if fmt == "csv":
        rows = [[s.name, int(s.passed), json.dumps(_clean(s.computed), sort_keys=True),
                 json.dumps(_clean(s.expected), sort_keys=True), s.source, s.tolerance, s.note]
                for s in report.steps]
        written.append(write_csv(out / f"{report.task}_steps.csv",
                                 ["step", "passed", "computed", "expected", "source", "tolerance", "note"], rows))
    t = out / f"{report.task}.timings.json"
    _write(t, json.dumps(_clean(report.timings), indent=2, sort_keys=True) + "\n")
    written.append(t)
    return written


def write_csv(path: Path, header, rows) -> Path:
    try:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return Path(path)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
