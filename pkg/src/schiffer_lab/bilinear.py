"""The form B(phi, psi; mu) = iint grad phi . grad conj(psi) - mu phi conj(psi) on solution subspaces.

When psi solves -Lap psi = mu psi, Green's formula reduces B to the boundary
integral of phi * conj(d psi / dn), so Gram matrices of trace data can be
assembled without touching the interior.  Members that are Dirichlet
eigenfunctions for some other eigenvalue lambda contribute
(lambda - mu) <u_i, u_j> through their L2 Gram matrix.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curve import BoundaryCurve, CurveError, TraceData
from .traces import GridMismatchError, omega_trace_table

GRAM_SCHEMA = 1
INDEPENDENCE_TOL = 1e-10


class LinearDependenceError(ValueError):
    def __init__(self, member: str, sigma: float):
        super().__init__(f"subspace members are linearly dependent (smallest singular value {sigma:.3e}); "
                         f"offending member: {member}")
        self.member = member
        self.sigma = sigma


def boundary_B(curve: BoundaryCurve, phi: TraceData, psi: TraceData, mu: float | None = None) -> complex:
    """oint phi_D conj(psi_N) ds, the value of B(phi, psi; mu) when psi solves -Lap psi = mu psi.

    ``mu`` is not needed by the boundary formula and is accepted for call-site clarity.
    """
    for t in (phi, psi):
        if t.n != curve.n:
            raise GridMismatchError(f"trace {t.label or '?'} has {t.n} samples, curve grid has {curve.n}")
    return complex(curve.integrate(phi.dirichlet * np.conj(psi.neumann)))


@dataclass(frozen=True)
class SubspaceMember:
    """One spanning function, represented by its boundary trace.

    ``eigenvalue`` is None for members solving -Lap u = mu u at the form's mu.
    Members with a Dirichlet eigenvalue lambda instead solve -Lap u = lambda u.
    """

    label: str
    trace: TraceData
    dirichlet_bc: bool = False
    eigenvalue: float | None = None
    block: str = ""


@dataclass
class SubspaceBasis:
    name: str
    members: list[SubspaceMember]
    # L2 inner products of the members that carry an eigenvalue, in member order
    l2_gram: np.ndarray | None = None

    def __post_init__(self):
        if not self.members:
            raise ValueError("empty subspace")
        n = self.members[0].trace.n
        for m in self.members:
            if m.trace.n != n:
                raise GridMismatchError(f"member {m.label} has {m.trace.n} samples, expected {n}")
        n_eig = sum(m.eigenvalue is not None for m in self.members)
        if n_eig and (self.l2_gram is None or self.l2_gram.shape != (n_eig, n_eig)):
            raise ValueError(f"l2_gram of shape ({n_eig}, {n_eig}) required for eigenfunction members")

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.members]

    @property
    def dim(self) -> int:
        return len(self.members)

    def traces(self) -> list[TraceData]:
        """Member traces with Dirichlet parts of Dirichlet-type members set to exactly 0."""
        out = []
        for m in self.members:
            t = m.trace
            if m.dirichlet_bc:
                t = TraceData(np.zeros(t.n), t.neumann, t.label)
            out.append(t)
        return out

    def independence(self) -> tuple[float, str]:
        """Smallest singular value of the stacked normalised traces and the member most involved."""
        rows = []
        for m, t in zip(self.members, self.traces()):
            v = t.vector()
            nrm = np.linalg.norm(v)
            if nrm == 0.0:
                return 0.0, m.label
            rows.append(v / nrm)
        A = np.array(rows).T
        _, s, vt = np.linalg.svd(A, full_matrices=False)
        worst = int(np.argmax(np.abs(vt[-1])))
        return float(s[-1]), self.members[worst].label

    def check_independent(self, tol: float = INDEPENDENCE_TOL) -> float:
        sigma, who = self.independence()
        if sigma <= tol:
            raise LinearDependenceError(who, sigma)
        return sigma


@dataclass
class GramReport:
    subspace: str
    mu: float
    labels: list[str]
    gram: np.ndarray
    spectrum: np.ndarray
    tolerance: float
    verdict: bool
    max_eigenvalue: float
    blocks: dict = field(default_factory=dict)
    hermitian_defect: float = 0.0
    min_singular_value: float = math.nan

    def to_dict(self) -> dict:
        return {
            "schema_version": GRAM_SCHEMA,
            "subspace": self.subspace,
            "mu": self.mu,
            "labels": self.labels,
            "gram": {"re": self.gram.real.tolist(), "im": self.gram.imag.tolist()},
            "spectrum": self.spectrum.tolist(),
            "max_eigenvalue": self.max_eigenvalue,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "blocks": self.blocks,
            "hermitian_defect": self.hermitian_defect,
            "min_singular_value": self.min_singular_value,
        }

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


def _pair_value(curve, members, traces, l2, eig_pos, i, j, mu) -> tuple[complex, bool]:
    """B(member i, member j) and whether it vanishes structurally."""
    a, b = members[i], members[j]
    if b.eigenvalue is None:
        # psi = b solves the mu-equation: boundary reduction in this order
        if a.dirichlet_bc:
            return 0j, True
        return boundary_B(curve, traces[i], traces[j]), False
    if a.eigenvalue is None:
        val, structural = _pair_value(curve, members, traces, l2, eig_pos, j, i, mu)
        return complex(np.conj(val)), structural
    # both Dirichlet eigenfunctions: B = (lambda_b - mu) <u_a, u_b>  (boundary term vanishes)
    return complex((b.eigenvalue - mu) * l2[eig_pos[i], eig_pos[j]]), False


def gram_on_subspace(curve: BoundaryCurve, basis: SubspaceBasis, mu: float = 1.0,
                     rel_tol: float = 1e-8, check: bool = True) -> GramReport:
    """Gram matrix of B on the span of ``basis``, its spectrum and the semi-negativity verdict."""
    sigma = basis.check_independent() if check else basis.independence()[0]
    members = basis.members
    traces = basis.traces()
    eig_pos = {}
    for i, m in enumerate(members):
        if m.eigenvalue is not None:
            eig_pos[i] = len(eig_pos)
    l2 = basis.l2_gram
    d = basis.dim
    G = np.zeros((d, d), dtype=complex)
    structural = np.zeros((d, d), dtype=bool)
    defect = 0.0
    for i in range(d):
        for j in range(i, d):
            val, st = _pair_value(curve, members, traces, l2, eig_pos, i, j, mu)
            G[i, j] = val
            G[j, i] = np.conj(val)
            structural[i, j] = structural[j, i] = st
            if i != j and members[i].eigenvalue is None and members[j].eigenvalue is None \
                    and not (members[i].dirichlet_bc or members[j].dirichlet_bc):
                other = boundary_B(curve, traces[j], traces[i])
                defect = max(defect, abs(other - np.conj(val)))
    G[np.diag_indices(d)] = G.diagonal().real
    spectrum = np.linalg.eigvalsh(G)
    norm = float(np.abs(spectrum).max()) if d else 0.0
    tol = rel_tol * max(norm, np.finfo(float).tiny)
    lam_max = float(spectrum[-1])
    return GramReport(
        subspace=basis.name,
        mu=float(mu),
        labels=basis.labels,
        gram=G,
        spectrum=spectrum,
        tolerance=tol,
        verdict=bool(lam_max <= tol),
        max_eigenvalue=lam_max,
        blocks=_block_summary(members, G, structural),
        hermitian_defect=float(defect),
        min_singular_value=float(sigma),
    )


def _block_summary(members, G, structural) -> dict:
    names = sorted({m.block for m in members if m.block})
    idx = {b: [i for i, m in enumerate(members) if m.block == b] for b in names}
    out = {}
    for a_pos, a in enumerate(names):
        for b in names[a_pos:]:
            sub = G[np.ix_(idx[a], idx[b])]
            st = structural[np.ix_(idx[a], idx[b])]
            key = a if a == b else f"{a}x{b}"
            entry = {"max_abs": float(np.abs(sub).max()), "structural_zero": bool(st.all())}
            if a == b:
                entry["spectrum"] = np.linalg.eigvalsh(sub).tolist()
            out[key] = entry
    return out


# ---------------------------------------------------------------------------
# standard subspaces built from the omega trace tables


def table_member(curve: BoundaryCurve, which: str, block: str = "") -> SubspaceMember:
    dirichlet = which in ("wx", "wy", "Rw")
    return SubspaceMember(which, omega_trace_table(curve, which), dirichlet_bc=dirichlet, block=block)


def w2_basis(curve: BoundaryCurve) -> SubspaceBasis:
    return SubspaceBasis("W2_thm31", [table_member(curve, w, "W2") for w in ("wxx", "wxy", "wyy")])


def v1_basis(curve: BoundaryCurve) -> SubspaceBasis:
    return SubspaceBasis("V1", [table_member(curve, w, "V1") for w in ("wxx", "wxy", "wyy")])


def v2_members(curve: BoundaryCurve, block: str = "V2") -> list[SubspaceMember]:
    g = omega_trace_table(curve, "gradRw")
    # R omega is real, so T(nabla_bar R omega) is the conjugate of T(nabla R omega)
    return [SubspaceMember("gradRw", g, block=block),
            SubspaceMember("gradbarRw", g.conj().with_label("gradbarRw"), block=block)]


def v2_basis(curve: BoundaryCurve) -> SubspaceBasis:
    return SubspaceBasis("V2", v2_members(curve))


def v12_basis(curve: BoundaryCurve) -> SubspaceBasis:
    return SubspaceBasis("W2_thm34", v1_basis(curve).members + v2_members(curve))


def w2_gram_exact() -> np.ndarray:
    """Exact W2 Gram: -1/2 int g_i g_j dtheta with g = (cos 2t, sin 2t, -cos 2t)."""
    return 0.5 * math.pi * np.array([[-1.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, -1.0]])


def est_w2_theta(c, m: int = 256) -> float:
    """-1/2 int_0^{2 pi} |c1 cos 2t + c2 sin 2t - c3 cos 2t|^2 dt by the trapezoid rule in t."""
    c1, c2, c3 = (complex(v) for v in c)
    t = 2 * np.pi * np.arange(m) / m
    g = c1 * np.cos(2 * t) + c2 * np.sin(2 * t) - c3 * np.cos(2 * t)
    return float(-0.5 * (2 * np.pi / m) * np.sum(np.abs(g) ** 2))


def w2_quadratic_form(curve: BoundaryCurve, c, measure: str = "s", m: int | None = None) -> float:
    """B(psi, psi) for psi = c1 wxx + c2 wxy + c3 wyy.

    ``measure="s"`` integrates the boundary reduction over arclength.
    ``measure="theta"`` evaluates the same integrand -1/2 |g|^2 on a uniform theta
    grid obtained by inverting theta(s) (convex curves only).
    """
    c1, c2, c3 = (complex(v) for v in c)
    if measure == "s":
        psi = (omega_trace_table(curve, "wxx") * c1 + omega_trace_table(curve, "wxy") * c2
               + omega_trace_table(curve, "wyy") * c3)
        return float(boundary_B(curve, psi, psi).real)
    if measure != "theta":
        raise ValueError("measure must be 's' or 'theta'")
    m = m or curve.n
    g_s = c1 * np.cos(2 * curve.theta) + c2 * np.sin(2 * curve.theta) - c3 * np.cos(2 * curve.theta)
    _, g = curve.theta_resample(np.abs(g_s) ** 2, m)
    return float(-0.5 * (2 * np.pi / m) * np.sum(g.real))


# ---------------------------------------------------------------------------
# integral identities


@dataclass(frozen=True)
class IdentityValue:
    name: str
    value: complex
    expectation: str   # "zero_any_curve" | "zero_central_symmetry" | "reported"

    @property
    def asserted_zero(self) -> bool:
        return self.expectation != "reported"


@dataclass
class IdentityReport:
    curve_label: str
    centrally_symmetric: bool
    strictly_convex: bool
    scale: float
    values: list[IdentityValue]

    def get(self, name: str) -> IdentityValue:
        for v in self.values:
            if v.name == name:
                return v
        raise KeyError(name)

    def max_asserted_residual(self) -> float:
        vals = [abs(v.value) for v in self.values if v.asserted_zero]
        return max(vals, default=0.0)

    def to_dict(self) -> dict:
        return {
            "curve": self.curve_label,
            "centrally_symmetric": self.centrally_symmetric,
            "strictly_convex": self.strictly_convex,
            "scale": self.scale,
            "identities": [
                {"name": v.name, "re": v.value.real, "im": v.value.imag, "expectation": v.expectation}
                for v in self.values
            ],
        }


_THETA_WEIGHTS = {
    "const": lambda th: np.ones_like(th),
    "cos_theta": np.cos,
    "sin_theta": np.sin,
    "cos_2theta": lambda th: np.cos(2 * th),
    "sin_2theta": lambda th: np.sin(2 * th),
    "cos_3theta": lambda th: np.cos(3 * th),
    "sin_3theta": lambda th: np.sin(3 * th),
}


_ODD_MODES = ("cos_theta", "sin_theta", "cos_3theta", "sin_3theta")


def orthogonality_identities(curve: BoundaryCurve, mu: float = 1.0, theta_form: bool = True,
                             m_theta: int | None = None) -> IdentityReport:
    """Boundary integrals of the table traces that vanish when omega exists.

    Values are absolute; ``scale`` is the L1 size of the integrand
    dRw/dn = (1/2) d(r^2)/ds for relative comparisons.  The theta forms
    int (dRw/dn) w(theta) / kappa dtheta need a strictly convex curve.
    """
    del mu  # the tables are normalised to mu = 1
    sym = curve.is_centrally_symmetric()
    convex = curve.is_strictly_convex()
    if theta_form and not convex:
        raise CurveError("theta-form identities need a strictly convex curve "
                         "(kappa = -dtheta/ds < 0 along the boundary)")
    f = omega_trace_table(curve, "Rw").neumann.real
    scale = float(curve.integrate(np.abs(f))) + float(np.finfo(float).eps)
    vals = [
        IdentityValue("est_wx", complex(curve.integrate(omega_trace_table(curve, "wx").neumann)), "zero_any_curve"),
        IdentityValue("est_wy", complex(curve.integrate(omega_trace_table(curve, "wy").neumann)), "zero_any_curve"),
        IdentityValue("est_Rw", complex(curve.integrate(f)), "zero_any_curve"),
        IdentityValue("Rw_cos_2theta_s", complex(curve.integrate(f * np.cos(2 * curve.theta))), "reported"),
    ]
    if theta_form:
        m = m_theta or curve.n
        th, g = curve.theta_resample(f / curve.kappa, m)
        dth = 2 * np.pi / m
        for key, w in _THETA_WEIGHTS.items():
            if key == "const":
                exp = "zero_any_curve"
            elif key in _ODD_MODES:
                exp = "zero_central_symmetry" if sym else "reported"
            else:
                exp = "reported"
            vals.append(IdentityValue(f"Rw_theta_{key}", complex(dth * np.sum(g * w(th))), exp))
    return IdentityReport(curve.spec.label, sym, convex, scale, vals)
