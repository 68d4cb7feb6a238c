"""Closed-form solutions of the Helmholtz equation -Lap u = k^2 u.

Two families are provided: plane waves and finite Fourier-Bessel sums
sum_m a_m J_m(k r) e^{i m phi}.  Both are closed under the complex
derivatives nabla = d/dx + i d/dy and nabla_bar = d/dx - i d/dy, which act as

    nabla     J_m e^{i m phi} = -k J_{m+1} e^{i(m+1) phi}
    nabla_bar J_m e^{i m phi} =  k J_{m-1} e^{i(m-1) phi}

so gradients and Hessians are exact.  These fields serve as oracles for the
boundary trace operators and as the basis of the eigensolver.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .special import bessel_j_table
from .curve import TraceData


class HelmholtzField:
    """Interface shared by the closed-form solutions."""

    k: float

    def value(self, z) -> np.ndarray:
        raise NotImplementedError

    def nabla(self) -> "HelmholtzField":
        raise NotImplementedError

    def nabla_bar(self) -> "HelmholtzField":
        raise NotImplementedError

    def dx(self) -> "HelmholtzField":
        return self.nabla().combine(self.nabla_bar(), 0.5, 0.5)

    def dy(self) -> "HelmholtzField":
        return self.nabla().combine(self.nabla_bar(), -0.5j, 0.5j)

    def combine(self, other: "HelmholtzField", a: complex, b: complex) -> "HelmholtzField":
        raise NotImplementedError

    def gradient(self, z) -> tuple[np.ndarray, np.ndarray]:
        return self.dx().value(z), self.dy().value(z)

    def hessian(self, z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        fx, fy = self.dx(), self.dy()
        return fx.dx().value(z), fx.dy().value(z), fy.dy().value(z)

    def trace(self, curve) -> TraceData:
        """T(u) = (u, du/dn) sampled on the curve grid."""
        z = curve.z
        ux, uy = self.gradient(z)
        n1, n2 = curve.normal
        return TraceData(self.value(z), n1 * ux + n2 * uy)


@dataclass(frozen=True)
class PlaneWave(HelmholtzField):
    """u = amplitude * exp(i k (x cos(alpha) + y sin(alpha)))."""

    alpha: float
    k: float = 1.0
    amplitude: complex = 1.0

    def value(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        phase = self.k * (z.real * math.cos(self.alpha) + z.imag * math.sin(self.alpha))
        return self.amplitude * np.exp(1j * phase)

    def nabla(self) -> "PlaneWave":
        return PlaneWave(self.alpha, self.k, self.amplitude * 1j * self.k * cmath.exp(1j * self.alpha))

    def nabla_bar(self) -> "PlaneWave":
        return PlaneWave(self.alpha, self.k, self.amplitude * 1j * self.k * cmath.exp(-1j * self.alpha))

    def combine(self, other, a, b):
        if not isinstance(other, PlaneWave) or (other.alpha, other.k) != (self.alpha, self.k):
            raise TypeError("can only combine plane waves sharing a wave vector")
        return PlaneWave(self.alpha, self.k, a * self.amplitude + b * other.amplitude)


@dataclass(frozen=True)
class FourierBesselField(HelmholtzField):
    """u = sum_m terms[m] * J_m(k |z - c|) e^{i m arg(z - c)}."""

    terms: dict = field(default_factory=dict)
    k: float = 1.0
    center: complex = 0.0

    @classmethod
    def real_mode(cls, m: int, k: float = 1.0, kind: str = "cos", amplitude: float = 1.0,
                  center: complex = 0.0) -> "FourierBesselField":
        """amplitude * J_m(k r) cos(m phi) (or sin)."""
        if kind not in ("cos", "sin"):
            raise ValueError("kind must be 'cos' or 'sin'")
        if m == 0:
            if kind == "sin":
                raise ValueError("sin mode of order 0 vanishes identically")
            return cls({0: complex(amplitude)}, k, center)
        # J_{-m} = (-1)^m J_m, so the e^{-i m phi} coefficient carries that sign
        sign = (-1) ** m
        if kind == "cos":
            return cls({m: 0.5 * amplitude, -m: 0.5 * sign * amplitude}, k, center)
        return cls({m: -0.5j * amplitude, -m: 0.5j * sign * amplitude}, k, center)

    def value(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex) - self.center
        r = np.abs(z)
        mmax = max((abs(m) for m in self.terms), default=0)
        jt = bessel_j_table(mmax, self.k * r)
        e = np.where(r > 0, z / np.where(r > 0, r, 1.0), 1.0)
        out = np.zeros(z.shape, dtype=complex)
        for m, a in self.terms.items():
            if a == 0:
                continue
            jm = jt[abs(m)] * (-1) ** (m % 2 if m < 0 else 0)
            out += a * jm * e ** m
        return out

    def _shift(self, step: int, factor: float) -> "FourierBesselField":
        new: dict[int, complex] = {}
        for m, a in self.terms.items():
            new[m + step] = new.get(m + step, 0j) + factor * a
        return FourierBesselField(new, self.k, self.center)

    def nabla(self) -> "FourierBesselField":
        return self._shift(+1, -self.k)

    def nabla_bar(self) -> "FourierBesselField":
        return self._shift(-1, self.k)

    def combine(self, other, a, b):
        if not isinstance(other, FourierBesselField) or (other.k, other.center) != (self.k, self.center):
            raise TypeError("can only combine Fourier-Bessel fields sharing k and center")
        new = {m: a * c for m, c in self.terms.items()}
        for m, c in other.terms.items():
            new[m] = new.get(m, 0j) + b * c
        return FourierBesselField(new, self.k, self.center)

    def rotation(self) -> "FourierBesselField":
        """R u = -y u_x + x u_y = d/dphi, which multiplies the m-th term by i m (center 0 only)."""
        if self.center != 0:
            raise ValueError("the rotation field is taken about the origin")
        return FourierBesselField({m: 1j * m * a for m, a in self.terms.items()}, self.k, self.center)

    def scaled(self, factor: complex) -> "FourierBesselField":
        return FourierBesselField({m: factor * a for m, a in self.terms.items()}, self.k, self.center)


def trace_of_nabla(u: HelmholtzField, curve) -> TraceData:
    return u.nabla().trace(curve)


def trace_of_nabla_bar(u: HelmholtzField, curve) -> TraceData:
    return u.nabla_bar().trace(curve)


def trace_of_rotation_scaling(u: HelmholtzField, curve) -> TraceData:
    """T((R + iS) u) where R + iS = (-y + i x) nabla_bar."""
    g = u.nabla_bar()
    gt = g.trace(curve)
    p = -curve.y + 1j * curve.x
    n1, n2 = curve.normal
    # grad(-y + i x) = (i, -1)
    dn_p = 1j * n1 - n2
    return TraceData(p * gt.dirichlet, dn_p * gt.dirichlet + p * gt.neumann)


def trace_of_rotation(u: HelmholtzField, curve) -> TraceData:
    """T(R u) with R = -y d/dx + x d/dy (second derivatives taken analytically)."""
    z = curve.z
    x, y = curve.x, curve.y
    n1, n2 = curve.normal
    ux, uy = u.gradient(z)
    uxx, uxy, uyy = u.hessian(z)
    value = -y * ux + x * uy
    dn_ux = n1 * uxx + n2 * uxy
    dn_uy = n1 * uxy + n2 * uyy
    return TraceData(value, -n2 * ux + n1 * uy - y * dn_ux + x * dn_uy)
