"""schiffer-lab <task> --config <path> --out <dir> [--n-samples N] [--tol T] [--format json|csv]

Exit codes: 0 verdict true, 1 verdict false, 2 configuration error,
3 solver failure, 4 output error.  Set SCHIFFER_LAB_LOG to a logging level
(DEBUG, INFO, ...) for more detail on stderr.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import TASKS, ConfigError, load_config
from .curve import CurveError
from .eigensolver import EigenSolverError
from .report import emit_report

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("schiffer_lab")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schiffer-lab", description="Run a verification task and write its report.")
    p.add_argument("task", choices=TASKS)
    p.add_argument("--config", required=True, help="sectioned key = value file with a [curve] section")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-samples", type=int, default=None, help="boundary samples (overrides the config)")
    p.add_argument("--tol", type=float, default=None, help="verification tolerance (overrides the config)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figures")
    return p


def _setup_logging() -> None:
    level = os.environ.get("SCHIFFER_LAB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    from .tasks import run_task

    try:
        cfg = load_config(args.config, args.task, args.out,
                          {"n_samples": args.n_samples, "tol": args.tol, "fmt": args.format})
        report = run_task(cfg)
    except (ConfigError, CurveError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EigenSolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        paths = emit_report(report, args.out, args.format)
        if not args.no_figures:
            from .plotting import write_figures

            paths += write_figures(report, args.out)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        log.info("wrote %s", p)
    failed = [s.name for s in report.steps if not s.passed]
    print(f"{report.task}: {report.status}" + (f" (failed: {', '.join(failed)})" if failed else ""))
    if report.summary:
        print(report.summary)
    return EXIT_OK if report.overall_verdict else EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
