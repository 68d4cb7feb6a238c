"""End-to-end verification tasks behind the command-line tool.

Every task returns a :class:`VerificationReport`.  Non-disk results are
numeric evidence: summaries say "consistent with", never "proves".
"""
from __future__ import annotations

import logging
import math
import time
from contextlib import contextmanager

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .bilinear import (
    LinearDependenceError,
    SubspaceBasis,
    SubspaceMember,
    gram_on_subspace,
    orthogonality_identities,
    table_member,
    v2_members,
    w2_basis,
    w2_gram_exact,
    w2_quadratic_form,
    est_w2_theta,
)
from .config import ConfigError, RunConfig
from .curve import BoundaryCurve, CurveSpec, build_curve
from .eigensolver import EigenResult, solve_spectrum, trace_of
from .fields import FourierBesselField, PlaneWave
from .nodal import count_nodal_domains, extract_nodal_graph, sample_field, sturm_zero_bound, zero_set_polylines
from .report import DEGENERATE, VerificationReport
from .special import bessel_j, bessel_roots
from .traces import TABLE_ENTRIES, omega_trace_by_composition, omega_trace_table, verify_commutation

log = logging.getLogger(__name__)

SCAN_RATIO = 100.0          # non-disk residual must exceed this multiple of the disk's radial residual
IDENTITY_TOL = 1e-9


@contextmanager
def _timed(report: VerificationReport, key: str):
    t0 = time.perf_counter()
    yield
    report.timings[key] = round(time.perf_counter() - t0, 6)


def _curve_info(curve: BoundaryCurve) -> dict:
    return {
        "label": curve.spec.label,
        "coefficients": [[k, re, im] for k, re, im in curve.spec.triples()],
        "n_samples": curve.n,
        "length": curve.length,
        "area": curve.area,
        "isoperimetric_ratio": 4 * math.pi * curve.area / curve.length ** 2,
        "strictly_convex": curve.is_strictly_convex(),
        "centrally_symmetric": curve.is_centrally_symmetric(),
        "circle": curve.is_circle(),
    }


def _search(cfg: RunConfig, curve: BoundaryCurve):
    if cfg.search_max is None:
        return None
    return (1e-6, cfg.search_max)


# ---------------------------------------------------------------------------
# disk tables


def disk_spectrum_table(bc: str, count: int, radius: float = 1.0) -> list[tuple[float, int, int]]:
    """(eigenvalue, m, n) for the disk, with multiplicity, increasing; Neumann starts at 0."""
    kind = "root_of_Jn_prime" if bc == "neumann" else "root_of_Jn"
    entries = [(0.0, 0, 0)] if bc == "neumann" else []
    for m in range(0, count + 1):
        for n, r in enumerate(bessel_roots(m, kind, count).roots, start=1):
            lam = (r / radius) ** 2
            entries.extend([(lam, m, n)] * (1 if m == 0 else 2))
    entries.sort()
    return entries[:count]


def threshold_cluster(values, index: int, rtol: float = 1e-6) -> dict:
    """Cluster of numerically equal eigenvalues around 1-based ``index``, with its diameter.

    ``inside`` is true when the threshold shares its cluster with a neighbour, so
    conclusions that depend on the exact ordering are ambiguous there.
    """
    v = np.asarray(values, dtype=float)
    i = index - 1
    tol = rtol * max(abs(v[i]), 1.0)
    lo, hi = i, i
    while lo > 0 and v[i] - v[lo - 1] <= tol:
        lo -= 1
    while hi < v.size - 1 and v[hi + 1] - v[i] <= tol:
        hi += 1
    return {"index": index, "members": list(range(lo + 1, hi + 2)), "diameter": float(v[hi] - v[lo]),
            "inside": hi > lo}


def _require_circle(curve: BoundaryCurve, task: str) -> float:
    if not curve.is_circle(1e-10) or abs(curve.centroid) > 1e-10 * curve.length:
        raise ConfigError(f"{task} needs a circle centred at the origin")
    return float(np.abs(curve.z).mean())


# ---------------------------------------------------------------------------
# disk reference


def analytic_omega_trace(omega: FourierBesselField, curve: BoundaryCurve, which: str):
    """Trace of a derivative of omega obtained by exact differentiation of the Bessel series."""
    if which == "wx":
        f = omega.dx()
    elif which == "wy":
        f = omega.dy()
    elif which == "wxx":
        f = omega.dx().dx()
    elif which == "wxy":
        f = omega.dx().dy()
    elif which == "wyy":
        f = omega.dy().dy()
    elif which == "Rw":
        f = omega.rotation()
    elif which == "RRw":
        f = omega.rotation().rotation()
    elif which == "gradRw":
        f = omega.rotation().nabla()
    else:
        raise ValueError(which)
    return f.trace(curve)


def run_disk_reference(cfg: RunConfig) -> VerificationReport:
    curve = build_curve(cfg.curve, cfg.n_samples)
    rho = _require_circle(curve, "disk_reference")
    rep = VerificationReport("disk_reference", _curve_info(curve))

    with _timed(rep, "omega"):
        R = bessel_roots(0, "root_of_Jn_prime", 1).roots[0]
        disk = build_curve(CurveSpec.circle(R), cfg.n_samples)
        omega = FourierBesselField.real_mode(0, 1.0, amplitude=1.0 / bessel_j(0, R))
        t = omega.trace(disk)
        rep.bound("omega_neumann_trace_sup", float(np.abs(t.neumann).max()), cfg.tol,
                  source="analytic Bessel solution on the rescaled disk")
        rep.bound("omega_dirichlet_trace_spread", float(np.abs(t.dirichlet - 1.0).max()), 1e-12,
                  source="analytic Bessel solution", note="omega = J0(r)/J0(R) equals 1 on the boundary")
        rep.series["omega_trace"] = (["theta", "dirichlet", "neumann"],
                                     [[th, d, n] for th, d, n in zip(disk.theta, t.dirichlet.real, t.neumann.real)])

    with _timed(rep, "tables"):
        neu = disk_spectrum_table("neumann", 13)
        mu = R ** 2
        position = 1 + sum(1 for lam, _, _ in neu if lam < mu * (1 - 1e-12))
        mu8 = neu[7][0]
        rep.add("mu_position_in_neumann_spectrum", position == 6, computed=position, expected=6,
                source="Bessel root tables", note="mu = (j'_{0,1})^2 on the unit-radius scale")
        ratio = mu / mu8
        rep.check("mu_over_mu8", ratio, 0.8318, 1e-4, source="Bessel root tables")
        rep.bound("mu_below_mu8", ratio, 1.0 - 1e-12, source="Bessel root tables")
        j11 = bessel_roots(1, "root_of_Jn", 1).roots[0]
        rep.check("mu_equals_lambda2", j11 ** 2, mu, 1e-10, relative=True, source="root identity J0' = -J1")
        rep.metrics.update({"R": R, "mu_R2": mu, "mu8_R2": mu8, "mu_over_mu8": ratio, "mu_position": position,
                            "lambda2_R2": j11 ** 2})

    with _timed(rep, "trace_tables"):
        worst = {}
        for which in TABLE_ENTRIES:
            a = omega_trace_table(disk, which)
            b = omega_trace_by_composition(disk, which)
            c = analytic_omega_trace(omega, disk, which)
            worst[which] = max(a.sup_distance(b), a.sup_distance(c), b.sup_distance(c))
        rep.bound("trace_tables_three_ways", max(worst.values()), cfg.tol,
                  source="closed form vs operator composition vs Bessel differentiation")
        rw = omega_trace_table(disk, "Rw").sup()
        rep.bound("Rw_trace_vanishes", rw, 1e-12, source="radial omega", note="R omega = 0 on the centred disk")
        rep.metrics["trace_table_discrepancy"] = worst
        rep.metrics["rw_degenerate"] = True

    with _timed(rep, "gram"):
        g = gram_on_subspace(disk, w2_basis(disk))
        rep.add("W2_semi_negative", g.verdict, computed=g.max_eigenvalue, expected="<= tolerance",
                source="boundary reduction of B", tolerance=g.tolerance)
        rep.bound("W2_gram_matches_theta_integral", float(np.abs(g.gram - w2_gram_exact()).max()), cfg.tol,
                  source="exact theta integral of the W2 form")
        rep.metrics["W2_spectrum"] = g.spectrum

    if cfg.solver_check:
        with _timed(rep, "solver"):
            n_res = solve_spectrum(curve, "neumann", 13, config=cfg.solver)
            d_res = solve_spectrum(curve, "dirichlet", 6, config=cfg.solver)
            rows = []
            for bc, res, tab in (("neumann", n_res, neu), ("dirichlet", d_res, disk_spectrum_table("dirichlet", 6))):
                expected = np.array([lam for lam, _, _ in tab])
                got = res.eigenvalues * rho ** 2
                pos = expected > 0
                err = float(np.max(np.abs(got[pos] - expected[pos]) / expected[pos]))
                rep.bound(f"{bc}_spectrum_relative_error", err, 1e-7, source="Bessel root tables")
                if bc == "neumann":
                    rep.bound("neumann_first_zero", abs(got[0]), 1e-9, source="constant eigenfunction")
                rep.metrics[f"{bc}_spectrum_scaled"] = got
                rows.extend([[i + 1, bc, g_, e] for i, (g_, e) in enumerate(zip(got, expected))])
                rep.warnings.extend(res.warnings)
            rep.series["spectrum"] = (["index", "bc", "eigenvalue_scaled", "bessel_table"], rows)
    rep.summary = (f"omega = J0(r)/J0(R) solves the overdetermined Neumann problem on the disk with mu/mu_8 = "
                   f"{rep.metrics['mu_over_mu8']:.6f}; R omega vanishes identically, the expected disk degeneracy.")
    return rep


# ---------------------------------------------------------------------------
# theorem chains


def run_theorem_chain(cfg: RunConfig, variant: int) -> VerificationReport:
    if variant not in (31, 34):
        raise ValueError("variant must be 31 or 34")
    n_u = 2 if variant == 31 else 5
    target_dim = 8 if variant == 31 else 13
    mu_index = 8 if variant == 31 else 13
    curve0 = build_curve(cfg.curve, cfg.n_samples)
    task = f"theorem{variant}_chain"
    if variant == 34 and not (curve0.is_centrally_symmetric() and curve0.is_strictly_convex()):
        raise ConfigError(f"{task} needs a strictly convex, centrally symmetric curve")
    rep = VerificationReport(task, _curve_info(curve0))
    circle = curve0.is_circle(1e-10)

    with _timed(rep, "dirichlet"):
        dres = solve_spectrum(curve0, "dirichlet", n_u + 1, _search(cfg, curve0), config=cfg.solver)
        rep.warnings.extend(dres.warnings)
    mu_hyp = float(dres.eigenvalues[n_u])
    clusters = {"lambda": threshold_cluster(dres.eigenvalues, n_u + 1)}
    scale = math.sqrt(mu_hyp)
    curve = build_curve(cfg.curve.scaled(scale), cfg.n_samples)
    ds = dres.rescaled(curve, scale)
    rep.metrics["mu_hypothesis"] = f"lambda_{n_u + 1}"
    rep.metrics["dirichlet_over_mu"] = ds.eigenvalues
    rep.bound("dirichlet_residuals", float(ds.residuals.max()), cfg.solver.residual_tol,
              source="solver residual certification")

    if cfg.solver_check:
        with _timed(rep, "neumann"):
            nres = solve_spectrum(curve0, "neumann", mu_index, _search(cfg, curve0), config=cfg.solver)
            rep.warnings.extend(nres.warnings)
        ratio = mu_hyp / float(nres.eigenvalues[mu_index - 1])
        clusters["mu"] = threshold_cluster(nres.eigenvalues, mu_index)
        rep.metrics[f"mu_over_mu{mu_index}"] = ratio
        rep.metrics["hypothesis_window_nonempty"] = bool(ratio < 1.0)

    rep.metrics["threshold_clusters"] = clusters
    for key, c in clusters.items():
        if c["inside"]:
            rep.warnings.append(f"{key}_{c['index']} lies in a cluster {c['members']} of diameter "
                                f"{c['diameter']:.3e}; order-sensitive conclusions are ambiguous")

    with _timed(rep, "gram"):
        members = [SubspaceMember(f"u{i + 1}", trace_of(ds, i, curve), dirichlet_bc=True,
                                  eigenvalue=float(ds.eigenvalues[i]), block="W1") for i in range(n_u)]
        members += [table_member(curve, w, "W1") for w in ("wx", "wy", "Rw")]
        v1 = "W2" if variant == 31 else "V1"
        members += [table_member(curve, w, v1) for w in ("wxx", "wxy", "wyy")]
        if variant == 34:
            members += v2_members(curve)
        l2 = ds.l2_gram(range(n_u))
        rep.metrics["l2_gram_offdiag"] = float(np.abs(l2 - np.diag(np.diag(l2))).max())

        rw_sup = omega_trace_table(curve, "Rw").sup()
        expected_dim = target_dim
        if circle:
            rep.bound("Rw_trace_vanishes", rw_sup, 1e-10, source="radial omega on the disk",
                      note="the disk collapses the subspace: expected degeneracy")
            rep.status_override = DEGENERATE
            members = [m for m in members if m.label != "Rw"]
            members, l2, dropped = _independent_subset(members, l2)
            dropped.insert(0, "Rw")
            expected_dim = len(members)
            rep.metrics["degenerate_members"] = dropped
        basis = SubspaceBasis(f"W_{task}", members, l2_gram=l2)
        try:
            gram = gram_on_subspace(curve, basis, mu=1.0, rel_tol=cfg.tol)
        except LinearDependenceError as exc:
            rep.add("dimension", False, computed=exc.member, expected=target_dim,
                    note=f"linear dependence, smallest singular value {exc.sigma:.3e}")
            rep.summary = f"dimension check failed at member {exc.member}"
            return rep
        dim = len(members)
        rep.add("dimension", dim == expected_dim, computed=dim, expected=expected_dim,
                note=f"smallest singular value of stacked traces {gram.min_singular_value:.3e}")
        rep.add("gram_semi_negative", gram.verdict, computed=gram.max_eigenvalue, expected="<= tolerance",
                tolerance=gram.tolerance, source="boundary reduction of B")
        blocks = gram.blocks
        for key, entry in sorted(blocks.items()):
            if "W1" in key and "x" in key:
                rep.add(f"{key}_structural_zero", entry["structural_zero"] and entry["max_abs"] == 0.0,
                        computed=entry["max_abs"], expected=0.0, source="zero Dirichlet traces of W1")
        w1_spec = np.array(blocks["W1"]["spectrum"])
        rep.bound("W1_semi_negative", float(w1_spec.max()), gram.tolerance, source="Dirichlet eigenvalues below mu")
        sub = blocks[v1]
        rep.bound(f"{v1}_semi_negative", float(max(sub["spectrum"])), gram.tolerance, source="theta integral of the W2 form")
        idx = [i for i, m in enumerate(members) if m.block == v1]
        rep.bound(f"{v1}_matches_theta_integral", float(np.abs(gram.gram[np.ix_(idx, idx)] - w2_gram_exact()).max()),
                  cfg.tol, source="exact theta integral of the W2 form")
        if variant == 34:
            rep.bound("V1xV2_vanishes", blocks["V1xV2"]["max_abs"], IDENTITY_TOL, source="central symmetry")
            iv = [i for i, m in enumerate(members) if m.block == "V2"]
            diag = gram.gram[iv, iv].real
            rep.bound("V2_diagonal_nonpositive", float(diag.max()), 0.0, source="boundary reduction")
            rep.bound("V2_offdiagonal_vanishes", float(abs(gram.gram[iv[0], iv[1]])), IDENTITY_TOL,
                      source="integration by parts")
            f = omega_trace_table(curve, "Rw").neumann.real
            _, fq = curve.theta_resample(f ** 2, curve.n)
            theta_val = -2 * np.pi * float(np.mean(fq))
            rep.check("V2_diagonal_theta_quadrature", float(diag[0]), theta_val,
                      IDENTITY_TOL * max(1.0, abs(theta_val)), source="direct theta quadrature")
        rep.metrics["gram_spectrum"] = gram.spectrum
        rep.metrics["gram_blocks"] = blocks
        rep.metrics["hermitian_defect_formal"] = gram.hermitian_defect
        rep.metrics["labels"] = gram.labels
        rep.series["gram_spectrum"] = (["index", "eigenvalue"], [[i + 1, v] for i, v in enumerate(gram.spectrum)])

    if curve.is_strictly_convex():
        with _timed(rep, "identities"):
            ids = orthogonality_identities(curve)
            rep.bound("orthogonality_identities", ids.max_asserted_residual(), IDENTITY_TOL * max(1.0, ids.scale),
                      source="closed curve and symmetry", note="formal identities are reported in metrics")
            rep.metrics["identities"] = ids.to_dict()

    label = "mu >= mu_8" if variant == 31 else "mu >= mu_13"
    if rep.overall_verdict and circle:
        rep.summary = (f"on the disk the subspace collapses to dimension {len(members)} "
                       f"(dropped: {', '.join(rep.metrics['degenerate_members'])}); this is the expected degeneracy.")
    elif rep.overall_verdict:
        rep.summary = (f"B is semi-negative on a {len(members)}-dimensional space at mu = lambda_{n_u + 1}; "
                       f"consistent with the minimax step forcing {label} (numeric evidence, not a proof).")
    else:
        rep.summary = "one or more chain steps failed; see steps"
    return rep


def _independent_subset(members, l2):
    """Greedy maximal independent subset, table traces first; returns (members, l2, dropped labels)."""
    order = sorted(range(len(members)), key=lambda i: members[i].eigenvalue is not None)
    keep: list[int] = []
    for i in order:
        trial = sorted(keep + [i])
        sub = [members[j] for j in trial]
        sigma, _ = SubspaceBasis("trial", sub, l2_gram=_sub_l2(members, l2, trial)).independence()
        if sigma > 1e-10:
            keep = trial
    dropped = [members[i].label for i in range(len(members)) if i not in keep]
    return [members[j] for j in keep], _sub_l2(members, l2, keep), dropped


def _sub_l2(members, l2, idx):
    eig = [j for j in range(len(members)) if members[j].eigenvalue is not None]
    pos = [eig.index(j) for j in idx if j in eig]
    return l2[np.ix_(pos, pos)] if pos else None


# ---------------------------------------------------------------------------
# overdetermined scan


def boundary_constancy(values: np.ndarray) -> float:
    """std(u) / mean |u| over the arclength grid."""
    v = np.asarray(values, dtype=float)
    m = float(np.mean(np.abs(v)))
    return float(np.std(v) / m) if m > 0 else math.inf


def min_constancy(traces: np.ndarray, seed: int = 0) -> float:
    """Minimum of the constancy residual over unit combinations of the columns of ``traces``."""
    U = np.asarray(traces, dtype=float)
    m = U.shape[1]
    if m == 1:
        return boundary_constancy(U[:, 0])
    if m == 2:
        ts = np.linspace(0.0, np.pi, 721)[:-1]
        vals = [boundary_constancy(U @ np.array([math.cos(t), math.sin(t)])) for t in ts]
        j = int(np.argmin(vals))
        dt = ts[1] - ts[0]
        res = minimize_scalar(lambda t: boundary_constancy(U @ np.array([math.cos(t), math.sin(t)])),
                              bounds=(ts[j] - dt, ts[j] + dt), method="bounded", options={"xatol": 1e-12})
        return float(min(res.fun, vals[j]))
    rng = np.random.default_rng(seed)
    starts = rng.standard_normal((64, m))
    f = lambda a: boundary_constancy(U @ (a / np.linalg.norm(a)))
    best = min(starts, key=f)
    res = minimize(f, best, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return float(min(res.fun, f(best)))


def constancy_scan(result: EigenResult) -> list[tuple[int, float, float, int]]:
    """(index, eigenvalue, residual, multiplicity) for every nonconstant eigenfunction."""
    lam = result.eigenvalues
    out = []
    i = 1
    while i < lam.size:
        j = i + 1
        while j < lam.size and abs(lam[j] - lam[i]) <= 1e-8 * lam[i]:
            j += 1
        U = np.column_stack([trace_of(result, k).dirichlet.real for k in range(i, j)])
        r = min_constancy(U)
        for k in range(i, j):
            out.append((k + 1, float(lam[k]), r, j - i))
        i = j
    return out


def run_overdetermined_scan(cfg: RunConfig) -> VerificationReport:
    curve = build_curve(cfg.curve, cfg.n_samples)
    rep = VerificationReport("overdetermined_scan", _curve_info(curve))
    with _timed(rep, "scan"):
        res = solve_spectrum(curve, "neumann", cfg.eigen_count, _search(cfg, curve), config=cfg.solver)
        rep.warnings.extend(res.warnings)
        scan = constancy_scan(res)
    area = curve.area
    rep.series["scan"] = (["index", "eigenvalue", "residual"], [[k, lam, r] for k, lam, r, _ in scan])
    rep.metrics["scan"] = [{"index": k, "eigenvalue_area_scaled": lam * area, "residual": r, "multiplicity": m}
                           for k, lam, r, m in scan]

    radius = math.sqrt(area / math.pi)
    table = disk_spectrum_table("neumann", cfg.eigen_count, radius)
    if curve.is_circle(1e-10):
        radial_rows = [(k, r) for (k, lam, r, _), (lt, m, _) in zip(scan, table[1:]) if m == 0]
        other_rows = [(k, r) for (k, lam, r, _), (lt, m, _) in zip(scan, table[1:]) if m != 0]
        rep.bound("radial_modes_constant_trace", max(r for _, r in radial_rows), 1e-7,
                  source="radial Bessel eigenfunctions", note=f"indices {[k for k, _ in radial_rows]}")
        rep.bound("angular_modes_nonconstant_trace", min(r for _, r in other_rows), 0.5, upper=False,
                  source="sign-changing angular traces")
        rep.summary = "radial disk eigenfunctions have constant boundary values; angular ones do not."
        return rep

    with _timed(rep, "disk_scan"):
        dres = solve_spectrum(build_curve(CurveSpec.circle(radius), cfg.n_samples), "neumann", cfg.eigen_count,
                              config=cfg.solver)
        dscan = constancy_scan(dres)
    radial = [r for (k, lam, r, _), (lt, m, _) in zip(dscan, table[1:]) if m == 0]
    disk_radial = max(radial) if radial else math.nan
    rep.series["disk_scan"] = (["index", "eigenvalue", "residual"], [[k, lam, r] for k, lam, r, _ in dscan])
    mu8 = float(res.eigenvalues[7]) if res.eigenvalues.size >= 8 else math.inf
    below = [r for k, lam, r, _ in scan if lam < mu8 * (1 - 1e-9)]
    floor = max(disk_radial, np.finfo(float).eps)
    rep.bound("residual_below_mu8_exceeds_disk", min(below), SCAN_RATIO * floor, upper=False,
              source="area-matched disk scan",
              note=f"threshold {SCAN_RATIO:g} x disk radial residual is an artifact-level choice")
    rep.metrics["disk_radial_residual"] = disk_radial
    rep.metrics["min_residual_below_mu8"] = min(below)
    rep.metrics["disk_scan"] = [{"index": k, "eigenvalue_area_scaled": lam * area, "residual": r}
                                for k, lam, r, _ in dscan]
    rep.summary = ("no eigenfunction below mu_8 has constant boundary values; consistent with the "
                   "exclusion of non-disks below mu_8 (numeric evidence, not a proof).")
    return rep


# ---------------------------------------------------------------------------
# trace validation


PLANE_WAVE_ANGLES = (0.0, 0.7, 1.9, 3.0, 4.4)


def run_trace_validation(cfg: RunConfig) -> VerificationReport:
    curve = build_curve(cfg.curve, cfg.n_samples)
    rep = VerificationReport("trace_validation", _curve_info(curve))
    with _timed(rep, "commutation"):
        rows = []
        worst = 0.0
        oracles = [(f"plane_wave_{a:g}", PlaneWave(a)) for a in PLANE_WAVE_ANGLES]
        oracles += [("bessel_J2_cos2", FourierBesselField.real_mode(2, 1.0, "cos")),
                    ("bessel_J3_sin3", FourierBesselField.real_mode(3, 1.0, "sin"))]
        for name, u in oracles:
            r = verify_commutation(curve, u)
            rel = max(r["M"], r["Mbar"], r["N"]) / max(r["scale"], 1.0)
            worst = max(worst, rel)
            rows.append([name, r["M"], r["Mbar"], r["N"], r["scale"]])
        rep.bound("commutation_residual", worst, cfg.tol, source="analytic Helmholtz solutions")
        rep.series["commutation"] = (["oracle", "M", "Mbar", "N", "scale"], rows)
    with _timed(rep, "tables"):
        disc = {w: omega_trace_table(curve, w).sup_distance(omega_trace_by_composition(curve, w)) for w in TABLE_ENTRIES}
        rep.bound("tables_match_composition", max(disc.values()), cfg.tol, source="operator composition")
        rep.metrics["table_discrepancy"] = disc
        trace_rows = []
        tabs = {w: omega_trace_table(curve, w) for w in ("wxx", "wxy", "wyy", "Rw")}
        for j in range(curve.n):
            row = [curve.s[j], curve.theta[j]]
            for w in tabs:
                row += [tabs[w].dirichlet[j].real, tabs[w].neumann[j].real]
            trace_rows.append(row)
        header = ["s", "theta"] + [f"{w}_{p}" for w in tabs for p in ("dirichlet", "neumann")]
        rep.series["traces"] = (header, trace_rows)
    with _timed(rep, "w2_form"):
        s_val = w2_quadratic_form(curve, (1, 0, 0), "s")
        rep.check("W2_form_vs_theta_integral", s_val, est_w2_theta((1, 0, 0)), 1e-9,
                  source="theta quadrature of the W2 form")
        if curve.is_strictly_convex():
            th = w2_quadratic_form(curve, (1, 0, 0), "theta")
            rep.check("W2_form_theta_reparametrised", th, s_val, 1e-9, source="theta reparametrisation")
    rep.summary = "boundary operators reproduce the traces of derivatives of exact Helmholtz solutions."
    return rep


# ---------------------------------------------------------------------------
# nodal suite


def disk_dirichlet_mode(k: int, radius: float = 1.0) -> tuple[str, FourierBesselField]:
    """k-th Dirichlet eigenfunction of the disk (1-based), with a fixed choice inside eigenspaces."""
    tab = disk_spectrum_table("dirichlet", k, radius)
    lam, m, n = tab[k - 1]
    first = next(i for i, e in enumerate(tab) if e == tab[k - 1])
    kind = "cos" if (m == 0 or k - 1 == first) else "sin"
    return f"J{m}_{n}_{kind}", FourierBesselField.real_mode(m, math.sqrt(lam), kind)


def field_evaluator(f: FourierBesselField):
    fx, fy = f.dx(), f.dy()
    return lambda z: (f.value(z).real, fx.value(z).real, fy.value(z).real)


def two_circle_field(radius: float):
    a, r = 0.4 * radius, 0.25 * radius

    def ev(z):
        p = np.abs(z - a) ** 2 - r * r
        q = np.abs(z + a) ** 2 - r * r
        px, py = 2 * (z.real - a), 2 * z.imag
        qx, qy = 2 * (z.real + a), 2 * z.imag
        return p * q, px * q + p * qx, py * q + p * qy

    return ev


def run_nodal_suite(cfg: RunConfig) -> VerificationReport:
    curve = build_curve(cfg.curve, cfg.n_samples)
    rho = _require_circle(curve, "nodal_suite")
    rep = VerificationReport("nodal_suite", _curve_info(curve))
    h = cfg.h * rho
    rep.artifacts = {}
    with _timed(rep, "courant"):
        counts = []
        for k in range(1, 7):
            name, f = disk_dirichlet_mode(k, rho)
            n_dom = count_nodal_domains(sample_field(curve, field_evaluator(f), h))
            counts.append((k, name, n_dom))
        rep.add("courant_bound", all(n <= k for k, _, n in counts), computed=[n for _, _, n in counts],
                expected="count <= k", source="Courant nodal domain theorem")
        rep.metrics["courant"] = [{"k": k, "mode": name, "domains": n} for k, name, n in counts]

    configs = []
    for m, n, kind in ((1, 1, "cos"), (2, 1, "cos"), (0, 2, "cos")):
        root = bessel_roots(m, "root_of_Jn", n).roots[-1]
        configs.append((f"J{m}_{n}_{kind}", field_evaluator(FourierBesselField.real_mode(m, root / rho, kind)), True))
    configs.append(("two_circles", two_circle_field(rho), False))
    rows = []
    with _timed(rep, "euler"):
        for name, ev, bnd in configs:
            fld = sample_field(curve, ev, h)
            r = extract_nodal_graph(fld, bnd)
            fine = extract_nodal_graph(sample_field(curve, ev, 0.5 * h), bnd)
            stable = (fine.n_domains_floodfill, fine.n_domains_euler, fine.n_components) == \
                     (r.n_domains_floodfill, r.n_domains_euler, r.n_components)
            rep.add(f"euler_matches_floodfill_{name}", r.euler_agrees and r.clean,
                    computed=r.n_domains_euler, expected=r.n_domains_floodfill, source="planar Euler formula",
                    note="; ".join(r.flags))
            rep.add(f"resolution_stable_{name}", stable, computed=fine.n_domains_floodfill,
                    expected=r.n_domains_floodfill, note="counts at h/2")
            if bnd and r.local_structure_ok:
                rep.add(f"segment_bound_{name}", r.segment_bound_holds, computed=r.n_segments,
                        expected=f">= {2 * r.n_interior_nodes + 1.5 * r.n_boundary_nodes:g}",
                        source="local degree of nodes")
            rep.metrics[f"graph_{name}"] = r.to_dict()
            rows.append([name, r.n_domains_floodfill, r.n_domains_euler, r.graph_vertices, r.graph_edges,
                         r.n_components, r.n_interior_nodes, r.n_boundary_nodes, r.n_segments])
            rep.artifacts[name] = fld
        rep.add("disconnected_components", rep.metrics["graph_two_circles"]["n_components"] == 2,
                computed=rep.metrics["graph_two_circles"]["n_components"], expected=2,
                source="constructed field")
        rep.series["nodal_counts"] = (["config", "domains_floodfill", "domains_euler", "vertices", "edges",
                                       "components", "interior_nodes", "boundary_nodes", "segments"], rows)
        poly = []
        for name, fld in rep.artifacts.items():
            for i, line in enumerate(zero_set_polylines(fld)):
                poly.extend([name, i, x, y] for x, y in line)
        rep.series["zero_set"] = (["config", "polyline", "x", "y"], poly)

    with _timed(rep, "sturm"):
        rng = np.random.default_rng(cfg.seed)
        N = 3
        th = 2 * np.pi * np.arange(256) / 256
        ok = 0
        min_zeros = math.inf
        for _ in range(cfg.sturm_draws):
            a = rng.standard_normal(5)
            b = rng.standard_normal(5)
            v = sum(a[j] * np.cos((j + 4) * th) + b[j] * np.sin((j + 4) * th) for j in range(5))
            res = sturm_zero_bound(v, N)
            ok += bool(res.orthogonal and res.bound_satisfied)
            min_zeros = min(min_zeros, res.zero_count)
        rep.add("sturm_bound_random", ok == cfg.sturm_draws, computed=ok, expected=cfg.sturm_draws,
                source="randomised trigonometric polynomials with modes 4..8",
                note=f"fewest zeros {min_zeros}, bound {2 * (N + 1)}")
        c4 = sturm_zero_bound(np.cos(4 * th), N)
        c2 = sturm_zero_bound(np.cos(2 * th), N)
        rep.add("sturm_cos4", c4.orthogonal and c4.zero_count == 8 and c4.bound_satisfied,
                computed=c4.zero_count, expected=8)
        rep.add("sturm_cos2_not_orthogonal", not c2.orthogonal, computed=c2.orthogonal, expected=False)
    rep.summary = "flood-fill and Euler-formula domain counts agree on all configurations."
    return rep


TASK_RUNNERS = {
    "disk_reference": run_disk_reference,
    "theorem31_chain": lambda cfg: run_theorem_chain(cfg, 31),
    "theorem34_chain": lambda cfg: run_theorem_chain(cfg, 34),
    "overdetermined_scan": run_overdetermined_scan,
    "trace_validation": run_trace_validation,
    "nodal_suite": run_nodal_suite,
}


def run_task(cfg: RunConfig) -> VerificationReport:
    rep = TASK_RUNNERS[cfg.task](cfg)
    if not rep.overall_verdict:
        failed = ", ".join(s.name for s in rep.steps if not s.passed)
        rep.summary = f"verification failed at: {failed}"
    return rep
