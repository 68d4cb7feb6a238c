"""Run configuration read from a sectioned key = value file.

Example::

    [curve]
    shape = fourier
    coefficients = 1 1.0 0.0; 3 0.04 0.0; -1 0.15 0.0
    n_samples = 512

    [solver]
    angular_order = 24

    [run]
    eigen_count = 13
    tol = 1e-8

``shape`` may also be ``circle`` (keys radius, center_x, center_y) or
``ellipse`` (keys a, b, rotation).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .curve import CurveSpec
from .eigensolver import SolverConfig

TASKS = (
    "disk_reference",
    "theorem31_chain",
    "theorem34_chain",
    "overdetermined_scan",
    "trace_validation",
    "nodal_suite",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    task: str
    curve: CurveSpec
    n_samples: int = 512
    solver: SolverConfig = field(default_factory=SolverConfig)
    search_max: float | None = None
    eigen_count: int = 13
    h: float = 0.01
    tol: float = 1e-8
    seed: int = 20240601
    solver_check: bool = True
    sturm_draws: int = 100
    out_dir: Path = Path("out")
    fmt: str = "json"

    def validate(self) -> "RunConfig":
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {', '.join(TASKS)}")
        if self.n_samples < 64 or self.n_samples % 2:
            raise ConfigError("n_samples must be an even integer >= 64")
        for name in ("tol", "h"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 1 <= self.eigen_count <= 20:
            raise ConfigError("eigen_count must be in [1, 20]")
        if self.task == "overdetermined_scan" and self.eigen_count < 13:
            raise ConfigError("overdetermined_scan needs eigen_count >= 13 to reach mu_13")
        if self.fmt not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        try:
            self.solver.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self


def parse_coefficients(text: str) -> list[tuple[int, float, float]]:
    """'k re im; k re im; ...' -> list of triples."""
    triples = []
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.replace(",", " ").split()
        if len(parts) != 3:
            raise ConfigError(f"coefficient entry {chunk!r} is not 'k re im'")
        try:
            triples.append((int(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError:
            raise ConfigError(f"coefficient entry {chunk!r} is not numeric") from None
    if not triples:
        raise ConfigError("no curve coefficients given")
    return triples


def curve_from_section(sec: configparser.SectionProxy) -> CurveSpec:
    shape = sec.get("shape", "fourier").strip().lower()
    label = sec.get("label", None)
    try:
        if shape == "circle":
            spec = CurveSpec.circle(sec.getfloat("radius", 1.0),
                                    complex(sec.getfloat("center_x", 0.0), sec.getfloat("center_y", 0.0)))
        elif shape == "ellipse":
            spec = CurveSpec.ellipse(sec.getfloat("a"), sec.getfloat("b", 1.0), sec.getfloat("rotation", 0.0))
        elif shape == "fourier":
            if "coefficients" not in sec:
                raise ConfigError("[curve] needs 'coefficients' for shape = fourier")
            spec = CurveSpec.from_triples(parse_coefficients(sec["coefficients"]), label or "fourier")
        else:
            raise ConfigError(f"unknown curve shape {shape!r}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[curve]: {exc}") from None
    if label:
        spec = replace(spec, label=label)
    return spec


def load_config(path: str | Path, task: str, out_dir: str | Path = "out", overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if "curve" not in cp:
        raise ConfigError(f"{path}: missing [curve] section")
    curve = cp["curve"]
    solver = cp["solver"] if "solver" in cp else {}
    run = cp["run"] if "run" in cp else {}
    overrides = overrides or {}
    try:
        solver_cfg = SolverConfig(
            angular_order=int(solver.get("angular_order", SolverConfig.angular_order)),
            n_collocation=_opt_int(solver.get("n_collocation")),
            n_interior=_opt_int(solver.get("n_interior")),
            sv_threshold=float(solver.get("sv_threshold", SolverConfig.sv_threshold)),
            residual_tol=float(solver.get("residual_tol", SolverConfig.residual_tol)),
        )
        cfg = RunConfig(
            task=task,
            curve=curve_from_section(curve),
            n_samples=int(overrides.get("n_samples") or curve.get("n_samples", 512)),
            solver=solver_cfg,
            search_max=_opt_float(solver.get("search_max")),
            eigen_count=int(run.get("eigen_count", 13)),
            h=float(run.get("h", 0.01)),
            tol=float(overrides.get("tol") or run.get("tol", 1e-8)),
            seed=int(run.get("seed", 20240601)),
            solver_check=str(run.get("solver_check", "true")).strip().lower() in ("1", "true", "yes", "on"),
            sturm_draws=int(run.get("sturm_draws", 100)),
            out_dir=Path(out_dir),
            fmt=overrides.get("fmt") or "json",
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None
    return cfg.validate()


def _opt_int(v):
    return None if v in (None, "") else int(v)


def _opt_float(v):
    return None if v in (None, "") else float(v)
