"""Smooth closed boundary curves sampled uniformly in arclength.

Curves are given by finitely many Fourier coefficients, z(t) = sum c_k e^{ikt}.
The sampled :class:`BoundaryCurve` stores x, y, the lifted tangent angle theta
and the curvature with the sign convention kappa = -dtheta/ds, so a convex
counterclockwise curve has kappa < 0 everywhere.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class CurveError(ValueError):
    """Raised for curves that are not smooth, simple, counterclockwise loops."""


# ---------------------------------------------------------------------------
# periodic spectral calculus


def wavenumbers(n: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)


def spectral_derivative(values, length: float, order: int = 1) -> np.ndarray:
    """d^order/ds^order of periodic samples on a uniform grid of period ``length``."""
    f = np.asarray(values)
    n = f.shape[-1]
    k = wavenumbers(n, length)
    if n % 2 == 0 and order % 2 == 1:
        k[n // 2] = 0.0
    out = np.fft.ifft((1j * k) ** order * np.fft.fft(f, axis=-1), axis=-1)
    return out if np.iscomplexobj(f) else out.real


def trapezoid(values, length: float) -> complex | float:
    """Periodic trapezoidal rule; spectrally accurate for smooth integrands."""
    f = np.asarray(values)
    return f.sum(axis=-1) * (length / f.shape[-1])


def fourier_interpolate(values, length: float, points) -> np.ndarray:
    """Evaluate the trigonometric interpolant of periodic samples at arbitrary points."""
    f = np.asarray(values)
    n = f.shape[-1]
    coef = np.fft.fft(f) / n
    k = wavenumbers(n, length)
    if n % 2 == 0:
        # split the Nyquist mode symmetrically so real data stays real
        nyq = coef[n // 2] / 2.0
        coef = np.concatenate([coef, [nyq]])
        coef[n // 2] = nyq
        k = np.concatenate([k, [-k[n // 2]]])
    pts = np.asarray(points, dtype=float)
    out = np.exp(1j * np.multiply.outer(pts, k)) @ coef
    return out if np.iscomplexobj(f) else out.real


# ---------------------------------------------------------------------------
# curve specification


@dataclass(frozen=True)
class CurveSpec:
    """z(t) = sum_k c_k exp(i k t), t in [0, 2 pi)."""

    coefficients: dict[int, complex]
    label: str = "curve"

    @classmethod
    def circle(cls, radius: float = 1.0, center: complex = 0.0) -> "CurveSpec":
        if not radius > 0:
            raise CurveError("radius must be positive")
        coefs = {1: complex(radius)}
        if center:
            coefs[0] = complex(center)
        return cls(coefs, label=f"circle(R={radius:g})")

    @classmethod
    def ellipse(cls, a: float, b: float, rotation: float = 0.0) -> "CurveSpec":
        if not (a > 0 and b > 0):
            raise CurveError("semi-axes must be positive")
        # a cos t + i b sin t = (a+b)/2 e^{it} + (a-b)/2 e^{-it}
        rot = complex(math.cos(rotation), math.sin(rotation))
        coefs = {1: 0.5 * (a + b) * rot}
        if a != b:
            coefs[-1] = 0.5 * (a - b) * rot
        return cls(coefs, label=f"ellipse(a={a:g},b={b:g})")

    @classmethod
    def from_triples(cls, triples, label: str = "curve") -> "CurveSpec":
        coefs: dict[int, complex] = {}
        for k, re, im in triples:
            coefs[int(k)] = coefs.get(int(k), 0j) + complex(float(re), float(im))
        return cls(coefs, label=label)

    def triples(self) -> list[tuple[int, float, float]]:
        return [(k, c.real, c.imag) for k, c in sorted(self.coefficients.items())]

    def rotated(self, angle: float) -> "CurveSpec":
        rot = complex(math.cos(angle), math.sin(angle))
        return CurveSpec({k: c * rot for k, c in self.coefficients.items()}, self.label)

    def scaled(self, factor: float) -> "CurveSpec":
        return CurveSpec({k: c * factor for k, c in self.coefficients.items()}, self.label)

    def shifted(self, t0: float) -> "CurveSpec":
        """Same curve, parameter origin moved to t0."""
        return CurveSpec(
            {k: c * complex(math.cos(k * t0), math.sin(k * t0)) for k, c in self.coefficients.items()},
            self.label,
        )

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ks = np.array(sorted(self.coefficients), dtype=float)
        cs = np.array([self.coefficients[int(k)] for k in ks], dtype=complex)
        return ks, cs

    def z(self, t) -> np.ndarray:
        ks, cs = self._arrays()
        return np.exp(1j * np.multiply.outer(np.asarray(t, float), ks)) @ cs

    def dz(self, t, order: int = 1) -> np.ndarray:
        ks, cs = self._arrays()
        return np.exp(1j * np.multiply.outer(np.asarray(t, float), ks)) @ (cs * (1j * ks) ** order)

    @property
    def max_mode(self) -> int:
        return int(max(abs(k) for k in self.coefficients))


# ---------------------------------------------------------------------------
# boundary data


@dataclass(frozen=True, eq=False)
class TraceData:
    """(u|boundary, du/dn|boundary) on a curve's uniform arclength grid.

    Index arithmetic is periodic; both arrays have the grid length.
    """

    dirichlet: np.ndarray
    neumann: np.ndarray
    label: str = ""

    def __post_init__(self):
        d = np.asarray(self.dirichlet, dtype=complex)
        n = np.asarray(self.neumann, dtype=complex)
        if d.shape != n.shape or d.ndim != 1:
            raise ValueError(f"trace components must be 1-d and equal length, got {d.shape} and {n.shape}")
        object.__setattr__(self, "dirichlet", d)
        object.__setattr__(self, "neumann", n)

    @classmethod
    def zeros(cls, n: int, label: str = "") -> "TraceData":
        return cls(np.zeros(n, complex), np.zeros(n, complex), label)

    @property
    def n(self) -> int:
        return self.dirichlet.size

    def __add__(self, other: "TraceData") -> "TraceData":
        return TraceData(self.dirichlet + other.dirichlet, self.neumann + other.neumann)

    def __sub__(self, other: "TraceData") -> "TraceData":
        return TraceData(self.dirichlet - other.dirichlet, self.neumann - other.neumann)

    def __mul__(self, c) -> "TraceData":
        return TraceData(c * self.dirichlet, c * self.neumann, self.label)

    __rmul__ = __mul__

    def conj(self) -> "TraceData":
        return TraceData(self.dirichlet.conj(), self.neumann.conj(), self.label)

    @property
    def real(self) -> "TraceData":
        return TraceData(self.dirichlet.real, self.neumann.real, self.label)

    @property
    def imag(self) -> "TraceData":
        return TraceData(self.dirichlet.imag, self.neumann.imag, self.label)

    def with_label(self, label: str) -> "TraceData":
        return TraceData(self.dirichlet, self.neumann, label)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.dirichlet, self.neumann])

    def sup(self) -> float:
        return float(max(np.abs(self.dirichlet).max(), np.abs(self.neumann).max()))

    def sup_distance(self, other: "TraceData") -> float:
        return (self - other).sup()

    def to_csv(self, curve, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "theta", "dirichlet_re", "dirichlet_im", "neumann_re", "neumann_im"])
            for s, th, d, nn in zip(curve.s, curve.theta, self.dirichlet, self.neumann):
                w.writerow([f"{v:.16e}" for v in (s, th, d.real, d.imag, nn.real, nn.imag)])
        return path


# ---------------------------------------------------------------------------
# sampled curve


GEOMETRIC_KINDS = (
    "const_one", "sin_theta", "cos_theta", "sin_2theta", "cos_2theta", "sin_3theta",
    "cos_3theta", "kappa", "inv_kappa", "x", "y", "r2", "drsq_ds", "d2rsq_ds2", "support",
)


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    spec: CurveSpec
    length: float
    s: np.ndarray
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    r2: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.s.size

    @property
    def z(self) -> np.ndarray:
        return self.x + 1j * self.y

    @property
    def ds(self) -> float:
        return self.length / self.n

    @property
    def tangent(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def normal(self) -> tuple[np.ndarray, np.ndarray]:
        """Outer unit normal (sin theta, -cos theta) for a counterclockwise curve."""
        return np.sin(self.theta), -np.cos(self.theta)

    def d_ds(self, values, order: int = 1) -> np.ndarray:
        return spectral_derivative(values, self.length, order)

    def integrate(self, values):
        return trapezoid(values, self.length)

    @property
    def area(self) -> float:
        # (1/2) \oint x dy - y dx
        return float(0.5 * self.integrate(self.x * np.sin(self.theta) - self.y * np.cos(self.theta)))

    @property
    def centroid(self) -> complex:
        # \iint x dA = (1/2) \oint x^2 dy,  \iint y dA = -(1/2) \oint y^2 dx
        cx = 0.5 * self.integrate(self.x ** 2 * np.sin(self.theta)) / self.area
        cy = -0.5 * self.integrate(self.y ** 2 * np.cos(self.theta)) / self.area
        return complex(cx, cy)

    @property
    def diameter(self) -> float:
        z = self.z
        return float(np.abs(z[:, None] - z[None, :]).max())

    def is_strictly_convex(self, tol: float = 1e-10) -> bool:
        return bool(np.all(self.kappa < -tol * (2 * np.pi / self.length)))

    def is_centrally_symmetric(self, tol: float = 1e-9) -> bool:
        """z(t + pi) = -z(t) for the defining coefficients (only odd modes)."""
        scale = max(abs(c) for c in self.spec.coefficients.values())
        return all(abs(c) <= tol * scale for k, c in self.spec.coefficients.items() if k % 2 == 0)

    def is_circle(self, tol: float = 1e-12) -> bool:
        r = np.abs(self.z - self.centroid)
        return bool(np.ptp(r) <= tol * r.mean())

    def contains(self, points, margin: float = 0.0) -> np.ndarray:
        """Winding-number test; ``margin`` > 0 also rejects points that close to the boundary."""
        from matplotlib.path import Path as MplPath

        pts = np.asarray(points, dtype=complex).ravel()
        poly = MplPath(np.column_stack([self.x, self.y]))
        inside = poly.contains_points(np.column_stack([pts.real, pts.imag]))
        if margin > 0:
            d = np.abs(pts[:, None] - self.z[None, :]).min(axis=1)
            inside &= d > margin
        return inside.reshape(np.shape(points))

    def geometric_trace(self, kind: str) -> np.ndarray:
        return geometric_trace_factory(self, kind)

    def theta_resample(self, values, m: int) -> tuple[np.ndarray, np.ndarray]:
        """Resample periodic data onto a uniform grid in theta (convex curves only).

        Returns (theta_grid, values_on_grid) with theta_grid[j] = theta(0) + 2 pi j / m.
        """
        if not self.is_strictly_convex():
            raise CurveError("theta is a valid parameter only when kappa = -dtheta/ds < 0")
        L = self.length
        periodic = self.theta - 2 * np.pi * self.s / L
        targets = self.theta[0] + 2 * np.pi * np.arange(m) / m
        s = L * np.arange(m) / m
        for _ in range(60):
            th = 2 * np.pi * s / L + fourier_interpolate(periodic, L, s)
            dth = -fourier_interpolate(self.kappa, L, s)
            step = (th - targets) / dth
            s = s - step
            if np.max(np.abs(step)) < 1e-14 * L:
                break
        return targets, fourier_interpolate(values, L, s)

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "x", "y", "theta", "kappa", "r2"])
            for row in zip(self.s, self.x, self.y, self.theta, self.kappa, self.r2):
                w.writerow([f"{v:.16e}" for v in row])
        return path


def _check_spec(spec: CurveSpec, n_check: int) -> None:
    if not spec.coefficients or all(k == 0 for k in spec.coefficients):
        raise CurveError("curve needs at least one non-constant Fourier mode")
    t = 2 * np.pi * np.arange(n_check) / n_check
    speed = np.abs(spec.dz(t))
    if speed.min() <= 1e-10 * speed.max():
        j = int(np.argmin(speed))
        raise CurveError(f"vanishing speed |z'(t)| near t = {t[j]:.6f}")
    z = spec.z(t)
    area = 0.5 * np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag)
    if area <= 0:
        raise CurveError("curve must be counterclockwise (positive signed area)")
    hit = _self_intersection(z)
    if hit is not None:
        raise CurveError(f"curve is not simple: self-intersection near ({hit.real:.6g}, {hit.imag:.6g})")


def _self_intersection(z: np.ndarray) -> complex | None:
    a = z
    d = np.roll(z, -1) - z
    n = z.size
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    r, sv = d[i], d[j]
    qp = a[j] - a[i]
    denom = r.real * sv.imag - r.imag * sv.real
    with np.errstate(divide="ignore", invalid="ignore"):
        tt = (qp.real * sv.imag - qp.imag * sv.real) / denom
        uu = (qp.real * r.imag - qp.imag * r.real) / denom
    hit = (denom != 0) & (tt >= 0) & (tt <= 1) & (uu >= 0) & (uu <= 1)
    if not hit.any():
        return None
    k = int(np.argmax(hit))
    return complex(a[i[k]] + tt[k] * r[k])


def build_curve(spec: CurveSpec, n_samples: int = 512) -> BoundaryCurve:
    """Sample ``spec`` at n_samples points equally spaced in arclength.

    The arclength map s(t) is integrated spectrally from |z'(t)| and inverted
    node by node with Newton's method safeguarded by bisection.
    """
    if n_samples < 64 or n_samples % 2:
        raise CurveError("n_samples must be even and >= 64")
    _check_spec(spec, n_check=max(512, 8 * spec.max_mode))

    nf = max(4096, 8 * n_samples, 64 * spec.max_mode)
    tf = 2 * np.pi * np.arange(nf) / nf
    speed_hat = np.fft.fft(np.abs(spec.dz(tf))) / nf
    kf = np.fft.fftfreq(nf, d=1.0 / nf)
    keep = np.abs(speed_hat) > 1e-17 * abs(speed_hat[0])
    keep[0] = False
    a0 = speed_hat[0].real
    ak, kk = speed_hat[keep], kf[keep]
    length = 2 * np.pi * a0

    def s_of_t(t):
        return a0 * t + ((np.exp(1j * np.multiply.outer(t, kk)) - 1.0) @ (ak / (1j * kk))).real

    targets = length * np.arange(n_samples) / n_samples
    t = 2 * np.pi * targets / length
    lo = np.zeros(n_samples)
    hi = np.full(n_samples, 2 * np.pi)
    for _ in range(100):
        f = s_of_t(t) - targets
        lo = np.where(f < 0, t, lo)
        hi = np.where(f > 0, t, hi)
        t_new = t - f / np.abs(spec.dz(t))
        bad = (t_new <= lo) | (t_new >= hi)
        t_new = np.where(bad, 0.5 * (lo + hi), t_new)
        done = np.max(np.abs(t_new - t)) < 1e-13
        t = t_new
        if done:
            break
    t[0] = 0.0

    z = spec.z(t)
    dz = spec.dz(t)
    theta = np.unwrap(np.angle(dz))
    s = targets
    periodic = theta - 2 * np.pi * s / length
    kappa = -(spectral_derivative(periodic, length) + 2 * np.pi / length)
    return BoundaryCurve(
        spec=spec,
        length=float(length),
        s=s,
        t=t,
        x=z.real.copy(),
        y=z.imag.copy(),
        theta=theta,
        kappa=kappa,
        r2=np.abs(z) ** 2,
        meta={"label": spec.label, "speed_modes": int(keep.sum())},
    )


def geometric_trace_factory(curve: BoundaryCurve, kind: str) -> np.ndarray:
    """Geometric factor appearing in the omega trace tables, sampled on the curve grid."""
    th = curve.theta
    simple = {
        "const_one": lambda: np.ones(curve.n),
        "sin_theta": lambda: np.sin(th),
        "cos_theta": lambda: np.cos(th),
        "sin_2theta": lambda: np.sin(2 * th),
        "cos_2theta": lambda: np.cos(2 * th),
        "sin_3theta": lambda: np.sin(3 * th),
        "cos_3theta": lambda: np.cos(3 * th),
        "kappa": lambda: curve.kappa.copy(),
        "inv_kappa": lambda: 1.0 / curve.kappa,
        "x": lambda: curve.x.copy(),
        "y": lambda: curve.y.copy(),
        "r2": lambda: curve.r2.copy(),
        "drsq_ds": lambda: curve.d_ds(curve.r2),
        "d2rsq_ds2": lambda: curve.d_ds(curve.r2, 2),
        # -y x' + x y'
        "support": lambda: curve.x * np.sin(th) - curve.y * np.cos(th),
    }
    try:
        return simple[kind]()
    except KeyError:
        raise ValueError(f"unknown geometric trace kind {kind!r}; expected one of {GEOMETRIC_KINDS}") from None
