"""Boundary traces, Helmholtz eigenproblems and nodal counts for planar domains."""
from .curve import BoundaryCurve, CurveError, CurveSpec, TraceData, build_curve
from .eigensolver import EigenResult, EigenSolverError, SolverConfig, solve_spectrum
from .report import VerificationReport

__version__ = "0.1.0"

__all__ = [
    "BoundaryCurve",
    "CurveError",
    "CurveSpec",
    "EigenResult",
    "EigenSolverError",
    "SolverConfig",
    "TraceData",
    "VerificationReport",
    "build_curve",
    "solve_spectrum",
]
