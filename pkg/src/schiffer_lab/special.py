"""Bessel functions of the first kind, their derivatives and positive roots.

Evaluation is split by regime: power series for small arguments, Miller's
backward recurrence (normalised by J0 + 2*sum J_2k = 1) for moderate ones and
Hankel's asymptotic expansion for large arguments.  All routines accept numpy
arrays for ``x``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_ORDER = 50
MAX_ARG = 1.0e4
SERIES_MAX_X = 2.0
ROOT_RESIDUAL_TOL = 1.0e-12

_RESCALE_AT = 1.0e250


class BesselDomainError(ValueError):
    """Order or argument outside the supported range."""


def _check(n: int, x: np.ndarray, max_order: int = MAX_ORDER) -> None:
    if int(n) != n or n < 0 or n > max_order:
        raise BesselDomainError(f"order must be an integer in [0, {max_order}], got {n!r}")
    if x.size and (not np.all(np.isfinite(x)) or x.min() < 0.0 or x.max() > MAX_ARG):
        raise BesselDomainError(f"argument must lie in [0, {MAX_ARG:g}]")


def _series(n: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    out = np.zeros_like(x)
    pos = half > 0
    if n == 0:
        out[~pos] = 1.0
    if not pos.any():
        return out
    h = half[pos]
    term = np.exp(n * np.log(h) - math.lgamma(n + 1))
    total = term.copy()
    q = h * h
    for k in range(1, 60):
        term = -term * q / (k * (k + n))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    out[pos] = total
    return out


def _miller_all(nmax: int, x: np.ndarray) -> np.ndarray:
    """J_0..J_nmax at every x > 0 by normalised backward recurrence."""
    xmax = float(x.max())
    start = int(max(nmax, xmax) + 30 + 12 * xmax ** (1.0 / 3.0))
    start += start % 2
    out = np.zeros((nmax + 1,) + x.shape)
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    for k in range(start, 0, -1):
        # j_cur holds J_k (unnormalised)
        if k <= nmax:
            out[k] = j_cur
        if k % 2 == 0:
            norm += 2.0 * j_cur
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _RESCALE_AT
        if big.any():
            s = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            j_cur = j_cur * s
            j_next = j_next * s
            norm = norm * s
            out[:, big] *= 1.0 / _RESCALE_AT
    out[0] = j_cur
    norm += j_cur
    return out / norm


def _hankel(n: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * n * n
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 80):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if not np.any(term):
            break
        if k % 2 == 1:
            q += (-1) ** ((k - 1) // 2) * term
        else:
            p += (-1) ** (k // 2) * term
        if np.all(np.abs(term) < 1e-17):
            break
    chi = x - (0.5 * n + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _asymptotic_threshold(n: int) -> float:
    return max(60.0, float(n * n))


def bessel_j(n: int, x):
    """J_n(x) for integer 0 <= n <= 50 and 0 <= x <= 1e4."""
    xa = np.asarray(x, dtype=float)
    _check(n, xa)
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_MAX_X
    large = flat >= _asymptotic_threshold(n)
    mid = ~(small | large)
    if small.any():
        out[small] = _series(n, flat[small])
    if mid.any():
        out[mid] = _miller_all(n, flat[mid])[n]
    if large.any():
        out[large] = _hankel(n, flat[large])
    out = out.reshape(np.shape(xa))
    return float(out) if out.ndim == 0 else out


def bessel_j_prime(n: int, x):
    """J_n'(x) from the recurrence (J_{n-1} - J_{n+1}) / 2 with J_{-1} = -J_1."""
    xa = np.asarray(x, dtype=float)
    _check(n, xa)
    lower = -np.asarray(bessel_j(1, xa)) if n == 0 else np.asarray(bessel_j(n - 1, xa))
    upper = np.asarray(bessel_j(n + 1, xa)) if n + 1 <= MAX_ORDER else _order_51(xa)
    out = 0.5 * (lower - upper)
    return float(out) if out.ndim == 0 else out


def _order_51(x: np.ndarray) -> np.ndarray:
    # J_51 via the three-term recurrence from J_49, J_50
    xs = np.where(x > 0, x, 1.0)
    out = (2 * MAX_ORDER / xs) * np.asarray(bessel_j(MAX_ORDER, x)) - np.asarray(bessel_j(MAX_ORDER - 1, x))
    return np.where(x > 0, out, 0.0)


def bessel_j_table(nmax: int, x) -> np.ndarray:
    """Array of shape (nmax + 1, *x.shape) holding J_0(x) .. J_nmax(x).

    Used by the Fourier-Bessel bases, which need every order at once.
    """
    xa = np.asarray(x, dtype=float)
    _check(nmax, xa, max_order=MAX_ORDER + 2)
    flat = np.atleast_1d(xa).ravel()
    out = np.empty((nmax + 1, flat.size))
    small = flat <= SERIES_MAX_X
    large = flat >= _asymptotic_threshold(nmax)
    mid = ~(small | large)
    for n in range(nmax + 1):
        if small.any():
            out[n, small] = _series(n, flat[small])
        if large.any():
            out[n, large] = _hankel(n, flat[large])
    if mid.any():
        out[:, mid] = _miller_all(nmax, flat[mid])
    return out.reshape((nmax + 1,) + np.shape(xa))


def _second_derivative(n: int, x: float, prime: bool) -> tuple[float, float]:
    """(f, f') where f = J_n (prime False) or f = J_n' (prime True)."""
    j = bessel_j(n, x)
    jp = bessel_j_prime(n, x)
    if not prime:
        return j, jp
    jpp = -jp / x - (1.0 - n * n / (x * x)) * j
    return jp, jpp


@dataclass(frozen=True)
class BesselRootTable:
    order: int
    kind: str  # "root_of_Jn" | "root_of_Jn_prime"
    roots: tuple[float, ...]

    def residuals(self) -> np.ndarray:
        f = bessel_j if self.kind == "root_of_Jn" else bessel_j_prime
        return np.array([abs(f(self.order, r)) for r in self.roots])

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["order", "kind", "index", "root", "residual"])
            for i, (r, res) in enumerate(zip(self.roots, self.residuals()), start=1):
                w.writerow([self.order, self.kind, i, repr(r), f"{res:.3e}"])
        return path


_KINDS = ("root_of_Jn", "root_of_Jn_prime")


def bessel_roots(n: int, kind: str, count: int) -> BesselRootTable:
    """First ``count`` positive roots of J_n or J_n'.

    Roots are bracketed by sign changes on a pi/4 grid and polished with
    Newton's method, falling back to bisection whenever a Newton step leaves
    the bracket.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    if not 1 <= count <= 100:
        raise ValueError("count must be in [1, 100]")
    prime = kind == "root_of_Jn_prime"
    f = (lambda t: bessel_j_prime(n, t)) if prime else (lambda t: bessel_j(n, t))

    step = math.pi / 4
    lo = 1e-6
    f_lo = f(lo)
    roots: list[float] = []
    limit = n + (count + 2) * math.pi + 10.0
    while len(roots) < count:
        hi = lo + step
        if hi > limit:
            raise RuntimeError(
                f"bracketing failed: found {len(roots)} of {count} roots of "
                f"{kind}(n={n}) on (0, {limit:.1f}]"
            )
        f_hi = f(hi)
        if f_lo == 0.0:
            roots.append(lo)
        elif f_lo * f_hi < 0.0:
            roots.append(_polish(n, prime, lo, hi))
        lo, f_lo = hi, f_hi
    table = BesselRootTable(n, kind, tuple(roots))
    bad = table.residuals() > ROOT_RESIDUAL_TOL
    if bad.any():
        raise RuntimeError(f"root residual above {ROOT_RESIDUAL_TOL}: {np.array(roots)[bad]}")
    return table


def _polish(n: int, prime: bool, a: float, b: float) -> float:
    fa, _ = _second_derivative(n, a, prime)
    x = 0.5 * (a + b)
    for _ in range(100):
        fx, dfx = _second_derivative(n, x, prime)
        if fx == 0.0:
            return x
        if fa * fx < 0.0:
            b = x
        else:
            a, fa = x, fx
        newton = x - fx / dfx if dfx != 0.0 else math.nan
        x_new = newton if a < newton < b else 0.5 * (a + b)
        if abs(x_new - x) <= 1e-15 * x:
            return x_new
        x = x_new
    return x
