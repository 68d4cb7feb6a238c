"""Dirichlet and Neumann eigenvalues of -Lap by the method of particular solutions.

Trial functions are real Fourier-Bessel modes J_m(k r) {cos, sin}(m phi)
about an interior anchor, so every trial function solves -Lap u = k^2 u
exactly.  For each trial k the basis is sampled at boundary collocation points
(values for Dirichlet, outward normal derivatives for Neumann) and at interior
points; the sine of the subspace angle

    sigma(k) = smallest singular value of Q_B,  [Q_B; Q_I] = orth([A_B; A_I])

dips to (numerical) zero exactly at eigenvalues.  Minima of sigma on a sweep
grid are refined by golden-section search.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .curve import BoundaryCurve, TraceData
from .special import bessel_j_table

log = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class EigenSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    angular_order: int = 24
    n_collocation: int | None = None
    n_interior: int | None = None
    sweep_step: float = 0.01          # in units of 2 pi / L for the wavenumber k
    sv_threshold: float = 1e-6        # largest sigma accepted as an eigenvalue
    mult_floor: float = 1e-9          # sigma_j below max(10 sigma_1, mult_floor) adds multiplicity
    cluster_ratio: float = 0.05       # sigma_2 dip (relative to its median) that triggers a local resample
    residual_tol: float = 1e-6
    refine_rtol: float = 1e-10
    quad_radial: int = 24
    max_angular_order: int = 48       # orders are raised by 12 up to this bound when a pass fails

    def validate(self) -> None:
        if not 1 <= self.angular_order <= 50:
            raise ValueError("angular_order must be in [1, 50]")
        if not self.angular_order <= self.max_angular_order <= 50:
            raise ValueError("max_angular_order must lie in [angular_order, 50]")
        for name in ("sweep_step", "sv_threshold", "mult_floor", "residual_tol", "refine_rtol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


# ---------------------------------------------------------------------------
# Fourier-Bessel basis


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Real Fourier-Bessel basis about ``anchor`` with angular orders 0..M.

    Column order: J_0, then (J_m cos m phi, J_m sin m phi) for m = 1..M.
    """

    anchor: complex
    order: int

    @property
    def size(self) -> int:
        return 2 * self.order + 1

    def _complex_modes(self, k: float, z: np.ndarray, extra: int = 0):
        w = np.asarray(z, dtype=complex) - self.anchor
        r = np.abs(w)
        e = np.where(r > 0, w / np.where(r > 0, r, 1.0), 1.0)
        jt = bessel_j_table(self.order + extra, k * r)
        powers = e[None, :] ** np.arange(-1, self.order + extra + 1)[:, None]
        return jt, powers  # F_m = jt[|m|] * sign * powers[m + 1]

    def _split(self, F: np.ndarray) -> np.ndarray:
        # F has rows m = 0..M; returns columns [Re F0, Re F1, Im F1, ...]
        cols = [F[0].real]
        for m in range(1, self.order + 1):
            cols.append(F[m].real)
            cols.append(F[m].imag)
        return np.column_stack(cols)

    def values(self, k: float, z) -> np.ndarray:
        jt, pw = self._complex_modes(k, np.ravel(z))
        F = jt[: self.order + 1] * pw[1:]
        return self._split(F)

    def gradients(self, k: float, z) -> tuple[np.ndarray, np.ndarray]:
        """(d/dx, d/dy) of every basis column."""
        jt, pw = self._complex_modes(k, np.ravel(z), extra=1)
        M = self.order
        F_up = jt[1: M + 2] * pw[2: M + 3]                         # F_{m+1}
        j_down = np.vstack([-jt[1:2], jt[0:M]])                    # J_{m-1}, J_{-1} = -J_1
        F_down = j_down * pw[0: M + 1]                             # F_{m-1}
        nab = -k * F_up
        nab_bar = k * F_down
        fx = 0.5 * (nab + nab_bar)
        fy = -0.5j * (nab - nab_bar)
        return self._split(fx), self._split(fy)

    def normal_derivatives(self, k: float, z, n1, n2) -> np.ndarray:
        gx, gy = self.gradients(k, z)
        return np.asarray(n1)[:, None] * gx + np.asarray(n2)[:, None] * gy


# ---------------------------------------------------------------------------
# geometry helpers


def _star_check(curve: BoundaryCurve, anchor: complex) -> np.ndarray:
    support = (curve.x - anchor.real) * np.sin(curve.theta) - (curve.y - anchor.imag) * np.cos(curve.theta)
    if support.min() <= 1e-8 * math.sqrt(curve.area):
        raise EigenSolverError(
            f"domain is not star-shaped with respect to the anchor {anchor:.6g}; "
            "the single-expansion basis does not apply"
        )
    return support


@dataclass(frozen=True, eq=False)
class InteriorQuadrature:
    """Polar quadrature of a star-shaped domain: anchor + rho (z(s) - anchor)."""

    points: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, curve: BoundaryCurve, anchor: complex, n_radial: int, stride: int = 1):
        support = _star_check(curve, anchor)
        rho, wr = np.polynomial.legendre.leggauss(n_radial)
        rho = 0.5 * (rho + 1.0)
        wr = 0.5 * wr
        idx = np.arange(0, curve.n, stride)
        zb = curve.z[idx] - anchor
        pts = anchor + np.multiply.outer(rho, zb)
        # dA = rho * support(s) drho ds
        w = np.multiply.outer(rho * wr, support[idx] * curve.ds * stride)
        return cls(pts.ravel(), w.ravel())

    def inner(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        return (f.conj().T * self.weights) @ g


# ---------------------------------------------------------------------------
# results


@dataclass
class EigenResult:
    boundary_condition: str
    eigenvalues: np.ndarray            # with multiplicity, increasing
    coefficients: list[np.ndarray]     # one coefficient vector per listed eigenvalue
    residuals: np.ndarray              # sup of the violated trace, unit interior L2 norm
    multiplicities: np.ndarray         # multiplicity of the cluster each entry belongs to
    sigma_min: np.ndarray              # subspace-angle value at each eigenvalue
    basis: EigenBasis
    curve: BoundaryCurve
    quadrature: InteriorQuadrature
    warnings: list[str] = field(default_factory=list)
    sweep: dict = field(default_factory=dict)
    clusters: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return self.eigenvalues.size

    def wavenumber(self, index: int) -> float:
        return math.sqrt(max(self.eigenvalues[index], 0.0))

    def rescaled(self, curve: BoundaryCurve, factor: float) -> "EigenResult":
        """The same eigenpairs on the domain scaled by ``factor`` about the origin.

        ``curve`` must be the scaled curve on the same arclength grid.  Eigenvalues
        scale by 1/factor^2 and eigenfunctions u(x / factor) / factor keep unit norm.
        """
        if curve.n != self.curve.n or np.abs(curve.z - factor * self.curve.z).max() > 1e-9 * curve.length:
            raise ValueError("curve is not the scaled copy of the solved curve")
        q = self.quadrature
        power = 1 if self.boundary_condition == "dirichlet" else 2
        return EigenResult(
            boundary_condition=self.boundary_condition,
            eigenvalues=self.eigenvalues / factor ** 2,
            coefficients=[c / factor for c in self.coefficients],
            residuals=self.residuals / factor ** power,
            multiplicities=self.multiplicities.copy(),
            sigma_min=self.sigma_min.copy(),
            basis=EigenBasis(self.basis.anchor * factor, self.basis.order),
            curve=curve,
            quadrature=InteriorQuadrature(q.points * factor, q.weights * factor ** 2),
            warnings=list(self.warnings),
            sweep={"k": self.sweep.get("k", np.empty(0)) / factor, "sigma": self.sweep.get("sigma", np.empty(0))},
            clusters=list(self.clusters),
        )

    def l2_gram(self, indices) -> np.ndarray:
        """Quadrature L2 inner products of the listed eigenfunctions."""
        vals = np.column_stack([self.basis.values(self.wavenumber(i), self.quadrature.points) @ self.coefficients[i]
                                for i in indices])
        return self.quadrature.inner(vals, vals).real

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "value", "multiplicity", "residual"])
            for i, (lam, m, res) in enumerate(zip(self.eigenvalues, self.multiplicities, self.residuals), start=1):
                w.writerow([i, repr(float(lam)), int(m), f"{res:.3e}"])
        return path


# ---------------------------------------------------------------------------
# the solver


class _Problem:
    def __init__(self, curve: BoundaryCurve, bc: str, cfg: SolverConfig):
        cfg.validate()
        if bc not in ("dirichlet", "neumann"):
            raise ValueError("bc must be 'dirichlet' or 'neumann'")
        self.curve, self.bc, self.cfg = curve, bc, cfg
        self.anchor = curve.centroid
        _star_check(curve, self.anchor)
        self.basis = EigenBasis(self.anchor, cfg.angular_order)
        nb_target = cfg.n_collocation or 4 * self.basis.size + 8
        stride = max(1, curve.n // nb_target)
        idx = np.arange(0, curve.n, stride)
        self.zb = curve.z[idx]
        self.n1, self.n2 = (a[idx] for a in curve.normal)
        self.wb = math.sqrt(curve.ds * stride)
        ni = cfg.n_interior or 2 * self.basis.size
        # deterministic, rotation- and scale-covariant interior points
        j = np.arange(ni)
        rho = 0.9 * np.sqrt((j + 0.5) / ni)
        pos = np.floor(curve.n * ((j * _GOLDEN) % 1.0)).astype(int)
        self.zi = self.anchor + rho * (curve.z[pos] - self.anchor)
        self.wi = math.sqrt(curve.area / ni)
        self.quad = InteriorQuadrature.build(curve, self.anchor, cfg.quad_radial, stride=max(1, curve.n // 256))

    def matrices(self, k: float):
        if self.bc == "dirichlet":
            ab = self.basis.values(k, self.zb)
        else:
            ab = self.basis.normal_derivatives(k, self.zb, self.n1, self.n2)
        ai = self.basis.values(k, self.zi)
        return self.wb * ab, self.wi * ai

    def decompose(self, k: float):
        ab, ai = self.matrices(k)
        A = np.vstack([ab, ai])
        # high orders are tiny at small k r; unit columns keep them above the rank cut
        norms = np.linalg.norm(A, axis=0)
        scale = 1.0 / np.where(norms > 0, norms, 1.0)
        U, S, Vt = np.linalg.svd(A * scale, full_matrices=False)
        keep = S > 1e-14 * S[0]
        Q_B = U[: ab.shape[0], keep]
        _, sig, Wt = np.linalg.svd(Q_B, full_matrices=False)
        return sig[::-1], Wt[::-1], Vt[keep] * scale[None, :], S[keep]

    def sigmas(self, k: float, count: int = 2) -> np.ndarray:
        sig = self.decompose(k)[0]
        out = np.full(count, 1.0)
        out[: min(count, sig.size)] = sig[:count]
        return out

    def null_coefficients(self, k: float, m: int) -> tuple[np.ndarray, np.ndarray]:
        sig, W, Vt, S = self.decompose(k)
        coefs = Vt.T @ ((W[:m] / S[None, :]).T)
        return coefs, sig


def _golden_min(f, a: float, b: float, rtol: float) -> tuple[float, float]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rtol * 0.5 * (a + b):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _local_minima(y: np.ndarray) -> np.ndarray:
    inner = (y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])
    return np.nonzero(inner)[0] + 1


def weyl_count(curve: BoundaryCurve, lam: float, bc: str) -> float:
    """Two-term Weyl estimate of the number of eigenvalues below lam."""
    sign = -1.0 if bc == "dirichlet" else 1.0
    return (curve.area * lam + sign * curve.length * math.sqrt(max(lam, 0.0))) / (4 * math.pi)


def _weyl_upper(curve: BoundaryCurve, count: int, bc: str) -> float:
    lo, hi = 0.0, 1.0
    while weyl_count(curve, hi, bc) < count:
        hi *= 2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if weyl_count(curve, mid, bc) < count:
            lo = mid
        else:
            hi = mid
    return hi


def solve_spectrum(
    curve: BoundaryCurve,
    bc: str,
    count: int,
    search_interval: tuple[float, float] | None = None,
    config: SolverConfig | None = None,
) -> EigenResult:
    """First ``count`` eigenvalues (with multiplicity) of -Lap with the given boundary condition.

    If a pass misses eigenvalues or leaves a boundary residual above tolerance,
    the angular order is raised by 12 (up to ``max_angular_order``) and the
    sweep repeated.
    """
    cfg = config or SolverConfig()
    cfg.validate()
    if not 1 <= count <= 20:
        raise ValueError("count must be in [1, 20]")
    while True:
        try:
            result = _solve_once(curve, bc, count, search_interval, cfg)
            if not (result.residuals > cfg.residual_tol).any():
                return _logged(result)
            failure = None
        except EigenSolverError as exc:
            result, failure = None, exc
        if cfg.angular_order >= cfg.max_angular_order:
            if failure is not None:
                raise EigenSolverError(f"{failure} (angular order {cfg.angular_order})") from None
            return _logged(result)
        nxt = min(cfg.angular_order + 12, cfg.max_angular_order)
        log.info("raising angular order %d -> %d", cfg.angular_order, nxt)
        cfg = replace(cfg, angular_order=nxt)


def _logged(result: EigenResult) -> EigenResult:
    for w in result.warnings:
        log.warning(w)
    return result


def _solve_once(curve, bc, count, search_interval, cfg) -> EigenResult:
    prob = _Problem(curve, bc, cfg)
    kscale = 2 * math.pi / curve.length
    dk = cfg.sweep_step * kscale

    target = count - 1 if bc == "neumann" else count
    if search_interval is None:
        lam_hi = 1.2 * _weyl_upper(curve, target + 3, bc)
        k_lo = 0.3 * kscale
    else:
        k_lo = math.sqrt(max(search_interval[0], (0.05 * kscale) ** 2))
        lam_hi = search_interval[1]

    found: list[tuple[float, int, float]] = []
    clusters: list[dict] = []
    ks_all: list[np.ndarray] = []
    s_all: list[np.ndarray] = []
    k_start = k_lo
    for _attempt in range(6):
        k_hi = math.sqrt(lam_hi)
        n_pts = max(int(math.ceil((k_hi - k_start) / dk)) + 1, 5)
        ks = np.linspace(k_start, k_hi, n_pts)
        sig = np.array([prob.sigmas(k, 2) for k in ks])
        ks_all.append(ks)
        s_all.append(sig)
        found.extend(_process_sweep(prob, ks, sig, clusters))
        found = _dedupe(found)
        n_found = sum(m for _, m, _ in found)
        if n_found >= target or search_interval is not None:
            break
        k_start = ks[-3]
        lam_hi *= 1.3
    ks_cat = np.concatenate(ks_all)
    s_cat = np.concatenate(s_all)
    order = np.argsort(ks_cat)
    return _assemble(prob, found, count, clusters, {"k": ks_cat[order], "sigma": s_cat[order]})


def _process_sweep(prob: _Problem, ks: np.ndarray, sig: np.ndarray, clusters: list) -> list:
    cfg = prob.cfg
    s1, s2 = sig[:, 0], sig[:, 1]
    med2 = float(np.median(s2))
    out = []
    for j in _local_minima(s1):
        a, b = ks[max(j - 1, 0)], ks[min(j + 1, ks.size - 1)]
        kstar, fmin = _golden_min(lambda k: prob.sigmas(k, 1)[0], a, b, cfg.refine_rtol)
        if fmin > cfg.sv_threshold:
            continue
        sv = prob.sigmas(kstar, 6)
        mult = int(np.sum(sv <= max(10 * sv[0], cfg.mult_floor)))
        if mult == 1 and sv[1] < cfg.cluster_ratio * med2:
            # possible nearly degenerate pair unresolved by the sweep grid
            lo, hi = ks[max(j - 2, 0)], ks[min(j + 2, ks.size - 1)]
            fine = np.linspace(lo, hi, 201)
            fs = np.array([prob.sigmas(k, 1)[0] for k in fine])
            mins = []
            for i in _local_minima(fs):
                kk, ff = _golden_min(lambda k: prob.sigmas(k, 1)[0], fine[i - 1], fine[i + 1], cfg.refine_rtol)
                if ff <= cfg.sv_threshold:
                    mins.append((kk, 1, ff))
            if len(mins) >= 2:
                clusters.append({"k": [m[0] for m in mins], "resolved": True})
                out.extend(mins)
                continue
            clusters.append({"k": [kstar], "resolved": False, "sigma2": float(sv[1])})
        out.append((kstar, mult, fmin))
    return out


def _dedupe(found: list) -> list:
    found = sorted(found)
    out: list = []
    for k, m, f in found:
        if out and abs(k - out[-1][0]) <= 1e-8 * k:
            if f < out[-1][2]:
                out[-1] = (k, max(m, out[-1][1]), f)
            continue
        out.append((k, m, f))
    return out


def _assemble(prob: _Problem, found: list, count: int, clusters: list, sweep: dict) -> EigenResult:
    curve, cfg = prob.curve, prob.cfg
    lams: list[float] = []
    coefs: list[np.ndarray] = []
    mults: list[int] = []
    sigmas: list[float] = []
    warnings: list[str] = []
    if prob.bc == "neumann":
        c0 = np.zeros(prob.basis.size)
        c0[0] = 1.0 / math.sqrt(curve.area)
        lams.append(0.0)
        coefs.append(c0)
        mults.append(1)
        sigmas.append(0.0)
    for k, m, f in found:
        if len(lams) >= count:
            break
        C, _ = prob.null_coefficients(k, m)
        C = _orthonormalize(prob, k, C)
        for j in range(m):
            lams.append(k * k)
            coefs.append(C[:, j])
            mults.append(m)
            sigmas.append(f)
    if len(lams) < count:
        raise EigenSolverError(f"found only {len(lams)} of {count} {prob.bc} eigenvalues in the search range")
    # keep whole clusters intact in the multiplicity column but cut the list at count
    lams, coefs, mults, sigmas = lams[:count], coefs[:count], mults[:count], sigmas[:count]
    eig = np.array(lams)
    residuals = np.array([_residual(prob, lam, c) for lam, c in zip(eig, coefs)])
    bad = residuals > cfg.residual_tol
    if bad.any():
        warnings.append(f"boundary residual above {cfg.residual_tol:g} at indices {[int(i) + 1 for i in np.nonzero(bad)[0]]}")
    lam_max = float(eig[-1])
    weyl = weyl_count(curve, lam_max, prob.bc)
    if abs(weyl - count) > max(3.0, 0.25 * count):
        warnings.append(
            f"possible missed eigenvalues: Weyl estimate {weyl:.1f} vs {count} found below {lam_max:.6g}"
        )
    result = EigenResult(
        boundary_condition=prob.bc,
        eigenvalues=eig,
        coefficients=coefs,
        residuals=residuals,
        multiplicities=np.array(mults),
        sigma_min=np.array(sigmas),
        basis=prob.basis,
        curve=curve,
        quadrature=prob.quad,
        warnings=warnings,
        sweep=sweep,
        clusters=clusters,
    )
    return result


def _orthonormalize(prob: _Problem, k: float, C: np.ndarray) -> np.ndarray:
    vals = prob.basis.values(k, prob.quad.points) @ C
    G = prob.quad.inner(vals, vals).real
    L = np.linalg.cholesky(G)
    C = C @ np.linalg.inv(L).T
    # fix a deterministic sign: largest-magnitude coefficient positive
    for j in range(C.shape[1]):
        i = int(np.argmax(np.abs(C[:, j])))
        if C[i, j] < 0:
            C[:, j] = -C[:, j]
    return C


def _residual(prob: _Problem, lam: float, c: np.ndarray) -> float:
    k = math.sqrt(max(lam, 0.0))
    curve = prob.curve
    if prob.bc == "dirichlet":
        vals = prob.basis.values(k, curve.z) @ c
    else:
        n1, n2 = curve.normal
        vals = prob.basis.normal_derivatives(k, curve.z, n1, n2) @ c
    return float(np.abs(vals).max())


# ---------------------------------------------------------------------------
# evaluation


def _check_points(result: EigenResult, z: np.ndarray) -> None:
    curve = result.curve
    inside = curve.contains(z)
    if not inside.all():
        d = np.abs(z[~inside][:, None] - curve.z[None, :]).min(axis=1)
        if (d > 1e-9 * curve.length).any():
            bad = z[~inside][d > 1e-9 * curve.length][0]
            raise ValueError(f"point {bad:.6g} lies outside the domain")


def evaluate_eigenfunction(result: EigenResult, index: int, points, gradient: bool = False):
    """Values (and optionally (d/dx, d/dy)) of eigenfunction ``index`` (0-based) at ``points``."""
    z = np.asarray(points, dtype=complex).ravel()
    _check_points(result, z)
    k = result.wavenumber(index)
    c = result.coefficients[index]
    vals = result.basis.values(k, z) @ c
    if not gradient:
        return vals
    gx, gy = result.basis.gradients(k, z)
    return vals, gx @ c, gy @ c


def trace_of(result: EigenResult, index: int, curve: BoundaryCurve | None = None) -> TraceData:
    """T(u_index) on the curve's arclength grid."""
    curve = curve or result.curve
    k = result.wavenumber(index)
    c = result.coefficients[index]
    n1, n2 = curve.normal
    d = result.basis.values(k, curve.z) @ c
    n = result.basis.normal_derivatives(k, curve.z, n1, n2) @ c
    return TraceData(d, n, f"{result.boundary_condition}_{index + 1}")


def interior_gram(result: EigenResult, indices, mu: float) -> np.ndarray:
    """B(u_i, u_j; mu) = iint grad u_i . grad u_j - mu u_i u_j by interior quadrature."""
    q = result.quadrature
    vals, gxs, gys = [], [], []
    for i in indices:
        v, gx, gy = _eval_all(result, i, q.points)
        vals.append(v)
        gxs.append(gx)
        gys.append(gy)
    V, GX, GY = (np.column_stack(a) for a in (vals, gxs, gys))
    return (q.inner(GX, GX) + q.inner(GY, GY) - mu * q.inner(V, V)).real


def _eval_all(result: EigenResult, index: int, z: np.ndarray):
    k = result.wavenumber(index)
    c = result.coefficients[index]
    gx, gy = result.basis.gradients(k, z)
    return result.basis.values(k, z) @ c, gx @ c, gy @ c
