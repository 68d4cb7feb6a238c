"""Boundary matrix operators realising nabla, nabla_bar and R + iS on trace data.

For u with -Lap u = u, the pair T(u) = (u, du/dn) determines T(nabla u),
T(nabla_bar u) and T((R + iS) u) through second order ordinary differential
operators in the arclength s:

    M    = e^{i theta}  [[d/ds, -i], [kappa d/ds + i(d2/ds2 + 1), -i kappa + d/ds]]
    Mbar = e^{-i theta} [[d/ds,  i], [kappa d/ds - i(d2/ds2 + 1),  i kappa + d/ds]]
    N    = (-y + i x) Mbar + [[0, 0], [d/ds, i]]

Derivatives in s are spectral on the periodic arclength grid.  The module also
holds the closed-form traces of the derivatives of the overdetermined
solution omega (normalised so omega = 1 on the boundary and mu = 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import BoundaryCurve, TraceData
from .fields import (
    HelmholtzField,
    trace_of_nabla,
    trace_of_nabla_bar,
    trace_of_rotation_scaling,
)


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BoundaryOperator:
    """2x2 array of operators a0(s) + a1(s) d/ds + a2(s) d2/ds2 times a prefactor.

    ``coef[r][c]`` is a tuple (a0, a1, a2) of arrays on the curve grid (or None
    for a zero entry).
    """

    name: str
    curve: BoundaryCurve
    prefactor: np.ndarray
    coef: tuple

    def __call__(self, t: TraceData) -> TraceData:
        if t.n != self.curve.n:
            raise GridMismatchError(f"{self.name}: trace has {t.n} samples, curve grid has {self.curve.n}")
        comps = (t.dirichlet, t.neumann)
        derivs = [(f, self.curve.d_ds(f), self.curve.d_ds(f, 2)) for f in comps]
        out = []
        for row in self.coef:
            acc = np.zeros(self.curve.n, dtype=complex)
            for entry, (f, df, d2f) in zip(row, derivs):
                if entry is None:
                    continue
                a0, a1, a2 = entry
                if a0 is not None:
                    acc += a0 * f
                if a1 is not None:
                    acc += a1 * df
                if a2 is not None:
                    acc += a2 * d2f
            out.append(self.prefactor * acc)
        return TraceData(out[0], out[1])


def operator_M(curve: BoundaryCurve) -> BoundaryOperator:
    one = np.ones(curve.n)
    k = curve.kappa
    return BoundaryOperator(
        "M", curve, np.exp(1j * curve.theta),
        (
            ((None, one, None), (-1j * one, None, None)),
            ((1j * one, k, 1j * one), (-1j * k, one, None)),
        ),
    )


def operator_Mbar(curve: BoundaryCurve) -> BoundaryOperator:
    one = np.ones(curve.n)
    k = curve.kappa
    return BoundaryOperator(
        "Mbar", curve, np.exp(-1j * curve.theta),
        (
            ((None, one, None), (1j * one, None, None)),
            ((-1j * one, k, -1j * one), (1j * k, one, None)),
        ),
    )


def operator_N(curve: BoundaryCurve) -> BoundaryOperator:
    one = np.ones(curve.n)
    k = curve.kappa
    p = (-curve.y + 1j * curve.x) * np.exp(-1j * curve.theta)
    return BoundaryOperator(
        "N", curve, one.astype(complex),
        (
            ((None, p, None), (1j * p, None, None)),
            ((-1j * p, p * k + 1.0, -1j * p), (1j * p * k + 1j, p, None)),
        ),
    )


def apply_M(curve: BoundaryCurve, t: TraceData) -> TraceData:
    """T(nabla u) from T(u)."""
    return operator_M(curve)(t)


def apply_Mbar(curve: BoundaryCurve, t: TraceData) -> TraceData:
    """T(nabla_bar u) from T(u)."""
    return operator_Mbar(curve)(t)


def apply_N(curve: BoundaryCurve, t: TraceData) -> TraceData:
    """T((R + iS) u) from T(u)."""
    return operator_N(curve)(t)


# ---------------------------------------------------------------------------
# closed-form traces of derivatives of omega

TABLE_ENTRIES = ("wx", "wy", "wxx", "wxy", "wyy", "Rw", "RRw", "gradRw")


def omega_trace_table(curve: BoundaryCurve, which: str) -> TraceData:
    """Closed-form T(.) of a derivative of omega in terms of theta, kappa and r^2.

    Valid under omega = 1, d omega/dn = 0 on the boundary and mu = 1.
    """
    th, k = curve.theta, curve.kappa
    zero = np.zeros(curve.n)
    half_dr2 = 0.5 * curve.d_ds(curve.r2)
    half_d2r2 = 0.5 * curve.d_ds(curve.r2, 2)
    if which == "wx":
        d, n = zero, -np.sin(th)
    elif which == "wy":
        d, n = zero, np.cos(th)
    elif which == "wxx":
        d, n = -0.5 * (1 - np.cos(2 * th)), k * np.cos(2 * th)
    elif which == "wxy":
        d, n = 0.5 * np.sin(2 * th), k * np.sin(2 * th)
    elif which == "wyy":
        d, n = -0.5 * (1 + np.cos(2 * th)), -k * np.cos(2 * th)
    elif which == "Rw":
        d, n = zero, half_dr2
    elif which == "RRw":
        support = -curve.y * np.cos(th) + curve.x * np.sin(th)
        d = -half_dr2 ** 2
        n = half_d2r2 * support - k * half_dr2 ** 2
    elif which == "gradRw":
        e = -1j * np.exp(1j * th)
        d, n = e * half_dr2, e * (k * half_dr2 + 1j * half_d2r2)
    else:
        raise ValueError(f"unknown table entry {which!r}; expected one of {TABLE_ENTRIES}")
    return TraceData(d, n, which)


def omega_trace_by_composition(curve: BoundaryCurve, which: str) -> TraceData:
    """Same entries as :func:`omega_trace_table`, built by composing M and N on T(omega) = (1, 0).

    Real-valued functions split as nabla f = f_x + i f_y, and R f = Re((R + iS) f)
    for real f.
    """
    omega = TraceData(np.ones(curve.n), np.zeros(curve.n))
    M = operator_M(curve)
    N = operator_N(curve)
    grad = M(omega)
    if which == "wx":
        out = grad.real
    elif which == "wy":
        out = grad.imag
    elif which in ("wxx", "wxy"):
        g = M(grad.real)
        out = g.real if which == "wxx" else g.imag
    elif which == "wyy":
        out = M(grad.imag).imag
    elif which == "Rw":
        out = N(omega).real
    elif which == "RRw":
        out = N(N(omega).real).real
    elif which == "gradRw":
        out = M(N(omega).real)
    else:
        raise ValueError(f"unknown table entry {which!r}; expected one of {TABLE_ENTRIES}")
    return out.with_label(which)


# ---------------------------------------------------------------------------
# commutation checks


def verify_commutation(curve: BoundaryCurve, u: HelmholtzField) -> dict[str, float]:
    """Sup-norm residuals of T(nabla u) - M T(u), and likewise for Mbar and N.

    ``u`` must solve -Lap u = u (wavenumber 1).
    """
    if abs(u.k - 1.0) > 1e-14:
        raise ValueError("the boundary operators assume -Lap u = u (k = 1)")
    t = u.trace(curve)
    scale = max(t.sup(), 1e-300)
    res = {
        "M": apply_M(curve, t).sup_distance(trace_of_nabla(u, curve)),
        "Mbar": apply_Mbar(curve, t).sup_distance(trace_of_nabla_bar(u, curve)),
        "N": apply_N(curve, t).sup_distance(trace_of_rotation_scaling(u, curve)),
    }
    res["scale"] = scale
    return res
