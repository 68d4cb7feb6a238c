"""Nodal sets of sampled real fields: domain counts, nodes, segments and Euler counts.

A field is sampled at the cell centres of a square grid over the domain's
bounding box.  The zero band {|u| < 2 h |grad u|} stands in for the nodal set.
Sign regions outside the band are counted by flood fill; independently, the
band is turned into a planar graph whose vertices are gradient-zero clusters
(nodes) and boundary junctions, and whose edges are the band arcs between them
together with the boundary arcs.  For a planar graph drawn on the closed
domain, the number of bounded faces equals C + E - V.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import ndimage
from scipy.cluster.hierarchy import DisjointSet

from .curve import BoundaryCurve

MIN_INSIDE_CELLS = 10_000
MAX_BAND_FRACTION = 0.20
STRIP_CELLS = 4.0
NODE_DILATION = 2

_FOUR = ndimage.generate_binary_structure(2, 1)
_EIGHT = ndimage.generate_binary_structure(2, 2)


class ResolutionError(ValueError):
    """Grid too coarse for a reliable nodal count."""


@dataclass(frozen=True, eq=False)
class SampledField:
    """Field values on cell centres x[j], y[i]; arrays are indexed [i, j]."""

    curve: BoundaryCurve
    h: float
    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray
    values: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    hess_max: float

    @property
    def grad_norm(self) -> np.ndarray:
        return np.hypot(self.gx, self.gy)

    @property
    def n_inside(self) -> int:
        return int(self.mask.sum())

    def zero_band(self) -> np.ndarray:
        return self.mask & (np.abs(self.values) < 2.0 * self.h * self.grad_norm)

    def gradient_small(self) -> np.ndarray:
        return self.mask & (self.grad_norm < 10.0 * self.h * self.hess_max)

    def confirms_zero(self, cells: np.ndarray) -> bool:
        """A true gradient zero within about one cell of ``cells`` forces |grad u| <= 2 h H there."""
        return bool(self.grad_norm[cells].min() <= 2.0 * self.h * self.hess_max)

    def boundary_strip(self, width: float = STRIP_CELLS) -> np.ndarray:
        depth = ndimage.distance_transform_edt(np.pad(self.mask, 1))[1:-1, 1:-1]
        return self.mask & (depth <= width)


def sample_field(curve: BoundaryCurve, evaluator: Callable, h: float) -> SampledField:
    """Sample ``evaluator`` on a grid of spacing ``h``.

    ``evaluator(z)`` takes complex points and returns either real values or a
    tuple (values, du/dx, du/dy).  Without gradients, centred differences of
    the evaluator are used.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x0, x1 = curve.x.min(), curve.x.max()
    y0, y1 = curve.y.min(), curve.y.max()
    nx = int(math.ceil((x1 - x0) / h)) + 2
    ny = int(math.ceil((y1 - y0) / h)) + 2
    xs = 0.5 * (x0 + x1) + h * (np.arange(nx) - 0.5 * (nx - 1))
    ys = 0.5 * (y0 + y1) + h * (np.arange(ny) - 0.5 * (ny - 1))
    Z = xs[None, :] + 1j * ys[:, None]
    mask = curve.contains(Z)
    n_in = int(mask.sum())
    if n_in == 0:
        raise ValueError("no grid cell lies inside the domain")
    if n_in < MIN_INSIDE_CELLS:
        raise ResolutionError(f"only {n_in} inside cells at h = {h:g}; need at least {MIN_INSIDE_CELLS}")
    pts = Z[mask]
    out = evaluator(pts)
    if isinstance(out, tuple):
        v, gx, gy = (np.real(np.asarray(a, dtype=complex)) for a in out)
    else:
        v = np.real(np.asarray(out, dtype=complex))
        d = 1e-6 * curve.length
        gx = np.real(evaluator(pts + d) - evaluator(pts - d)) / (2 * d)
        gy = np.real(evaluator(pts + 1j * d) - evaluator(pts - 1j * d)) / (2 * d)
    if not np.all(np.isfinite(v)):
        raise ValueError("evaluator returned non-finite values inside the domain")
    grids = []
    for a in (v, gx, gy):
        g = np.full(mask.shape, np.nan)
        g[mask] = a
        grids.append(g)
    return SampledField(curve, h, xs, ys, mask, grids[0], grids[1], grids[2], _hessian_bound(*grids, mask, h))


def _hessian_bound(v, gx, gy, mask, h) -> float:
    """Largest finite-difference Hessian entry over the zero band (whole domain if the band is empty)."""
    core = ndimage.binary_erosion(mask, _FOUR)
    band = core & (np.abs(np.nan_to_num(v)) < 2.0 * h * np.hypot(np.nan_to_num(gx), np.nan_to_num(gy)))
    if band.any():
        core = band
    if not core.any():
        return 0.0
    best = 0.0
    for g in (gx, gy):
        dy, dx = np.gradient(np.where(mask, g, 0.0), h)
        best = max(best, float(np.abs(dx[core]).max()), float(np.abs(dy[core]).max()))
    return best


# ---------------------------------------------------------------------------
# flood fill


def _sign_regions(f: SampledField):
    band = f.zero_band()
    frac = band.sum() / f.n_inside
    if frac > MAX_BAND_FRACTION:
        raise ResolutionError(f"zero band covers {100 * frac:.1f}% of the domain; refine h")
    min_size = max(4, int(1e-3 * f.n_inside))
    regions = []
    for sign in (1, -1):
        cells = f.mask & ~band & (sign * np.nan_to_num(f.values) > 0)
        lab, n = ndimage.label(cells, _FOUR)
        sizes = ndimage.sum_labels(cells, lab, np.arange(1, n + 1))
        regions.extend((sign, int(s)) for s in sizes if s >= min_size)
    return regions


def count_nodal_domains(f: SampledField) -> int:
    """Number of same-sign regions (4-connected), ignoring the zero band and tiny fragments."""
    return len(_sign_regions(f))


# ---------------------------------------------------------------------------
# nodal graph


@dataclass
class NodalReport:
    n_interior_nodes: int
    n_boundary_nodes: int
    n_segments: int
    n_components: int
    n_domains_floodfill: int
    n_domains_euler: int
    graph_vertices: int
    graph_edges: int
    graph_components: int
    boundary_in_nodal_set: bool
    degrees_interior: list[int] = field(default_factory=list)
    degrees_boundary: list[int] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    sturm_zero_count: int | None = None

    @property
    def clean(self) -> bool:
        return not self.flags

    @property
    def euler_agrees(self) -> bool:
        return self.n_domains_euler == self.n_domains_floodfill

    @property
    def local_structure_ok(self) -> bool:
        """Every node (gradient zero on the nodal set) has the minimal local degree (4 inside, 3 on the boundary)."""
        return all(d >= 4 for d in self.degrees_interior) and all(d >= 3 for d in self.degrees_boundary)

    @property
    def segment_bound_holds(self) -> bool:
        return self.n_segments >= 2 * self.n_interior_nodes + 1.5 * self.n_boundary_nodes

    def to_dict(self) -> dict:
        return {
            "n_interior_nodes": self.n_interior_nodes,
            "n_boundary_nodes": self.n_boundary_nodes,
            "n_segments": self.n_segments,
            "n_components": self.n_components,
            "n_domains_floodfill": self.n_domains_floodfill,
            "n_domains_euler": self.n_domains_euler,
            "graph": {"vertices": self.graph_vertices, "edges": self.graph_edges,
                      "components": self.graph_components},
            "boundary_in_nodal_set": self.boundary_in_nodal_set,
            "degrees_interior": self.degrees_interior,
            "degrees_boundary": self.degrees_boundary,
            "segment_bound_holds": self.segment_bound_holds,
            "local_structure_ok": self.local_structure_ok,
            "euler_agrees": self.euler_agrees,
            "flags": self.flags,
            "sturm_zero_count": self.sturm_zero_count,
        }

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


class _Graph:
    def __init__(self):
        self.kinds: list[str] = []
        self.edges: list[tuple[int, int]] = []

    def add_vertex(self, kind: str) -> int:
        self.kinds.append(kind)
        return len(self.kinds) - 1

    def add_edge(self, a: int, b: int) -> None:
        self.edges.append((a, b))

    def degree(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)

    def components(self, subset=None) -> int:
        verts = range(len(self.kinds)) if subset is None else subset
        ds = DisjointSet(verts)
        for a, b in self.edges:
            if a in ds and b in ds:
                ds.merge(a, b)
        return ds.n_subsets


def _boundary_order(f: SampledField, cells: np.ndarray) -> float:
    """Arclength position of the boundary point nearest to a patch of cells."""
    ii, jj = np.nonzero(cells)
    zc = complex(f.x[jj].mean(), f.y[ii].mean())
    k = int(np.argmin(np.abs(f.curve.z - zc)))
    return float(f.curve.s[k])


def extract_nodal_graph(f: SampledField, boundary_in_nodal_set: bool) -> NodalReport:
    """Planar graph of the zero band on the closed domain and its counts."""
    flags: list[str] = []
    band = f.zero_band()
    small = f.gradient_small()
    strip = f.boundary_strip()
    d_ff = count_nodal_domains(f)
    g = _Graph()

    # interior nodes: gradient-zero clusters on the band away from the boundary
    node_lab, n_clusters = ndimage.label(band & small, _EIGHT)
    vlabel = np.zeros(f.mask.shape, dtype=int)   # vertex id + 1 over each vertex region
    node_region = np.zeros_like(f.mask)
    interior_ids = []
    for c in range(1, n_clusters + 1):
        cells = node_lab == c
        if (cells & strip).any() or not f.confirms_zero(cells):
            continue
        region = ndimage.binary_dilation(cells, _EIGHT, iterations=NODE_DILATION) & f.mask
        v = g.add_vertex("node")
        interior_ids.append(v)
        vlabel[region & (vlabel == 0)] = v + 1
        node_region |= region

    # boundary nodes in the gradient sense
    bnode_lab, n_bnodes = ndimage.label(strip & band & small, _EIGHT)
    for c in range(1, n_bnodes + 1):
        cells = bnode_lab == c
        if not f.confirms_zero(cells):
            bnode_lab[cells] = 0

    arcs_mask = band & ~strip & ~node_region
    arc_lab, n_arcs = ndimage.label(arcs_mask, _EIGHT)
    arc_sizes = ndimage.sum_labels(arcs_mask, arc_lab, np.arange(1, n_arcs + 1))

    # boundary junctions: where arcs run into the strip, merged through boundary node clusters
    near_arcs = ndimage.binary_dilation(arcs_mask, _EIGHT, iterations=2)
    contact = strip & near_arcs
    for c in range(1, n_bnodes + 1):
        cells = bnode_lab == c
        if (cells & contact).any():
            contact |= cells
    contact_lab, n_contacts = ndimage.label(contact, _EIGHT)
    boundary_ids = []
    positions = []
    for c in range(1, n_contacts + 1):
        cells = contact_lab == c
        v = g.add_vertex("boundary")
        boundary_ids.append(v)
        positions.append(_boundary_order(f, cells))
        vlabel[cells & (vlabel == 0)] = v + 1

    # boundary nodes: junctions that contain a gradient-zero cluster
    grad_zero_boundary = [v for v, c in zip(boundary_ids, range(1, n_contacts + 1))
                      if ((contact_lab == c) & (bnode_lab > 0)).any()]
    isolated_bnodes = sum(1 for c in range(1, n_bnodes + 1) if not ((bnode_lab == c) & contact).any())

    # interior arcs
    vert_any = vlabel > 0
    vert_touch = ndimage.binary_dilation(vert_any, _EIGHT)
    min_arc = max(3, int(STRIP_CELLS))
    for a in range(1, n_arcs + 1):
        cells = arc_lab == a
        ends_mask = cells & vert_touch
        end_lab, n_ends = ndimage.label(ends_mask, _EIGHT)
        if n_ends == 0 and arc_sizes[a - 1] < min_arc:
            continue
        ends = []
        for e in range(1, n_ends + 1):
            around = ndimage.binary_dilation(end_lab == e, _EIGHT) & vert_any
            ids = vlabel[around]
            ends.append(int(np.bincount(ids).argmax()) - 1)
        if n_ends == 0:
            v = g.add_vertex("loop")
            g.add_edge(v, v)
        elif n_ends == 1:
            flags.append(f"arc {a} has a single end")
            v = g.add_vertex("dangling")
            g.add_edge(ends[0], v)
        elif n_ends == 2:
            g.add_edge(ends[0], ends[1])
        else:
            flags.append(f"arc {a} has {n_ends} ends (unresolved junction)")
            v = g.add_vertex("junction")
            for e in ends:
                g.add_edge(e, v)

    # boundary arcs: the boundary is always part of the graph so faces are bounded
    order = [v for _, v in sorted(zip(positions, boundary_ids))]
    if order:
        for a, b in zip(order, order[1:] + order[:1]):
            g.add_edge(a, b)
    else:
        v = g.add_vertex("boundary_loop")
        g.add_edge(v, v)
    n_boundary_edges = max(len(order), 1)

    V, E = len(g.kinds), len(g.edges)
    C = g.components()
    d_euler = C + E - V

    # components of the nodal set itself
    boundary_verts = set(boundary_ids) | {i for i, k in enumerate(g.kinds) if k == "boundary_loop"}
    if boundary_in_nodal_set:
        n_comp = C
        n_segments = E
    else:
        inner = _Graph()
        inner.kinds = list(g.kinds)
        inner.edges = list(g.edges[: E - n_boundary_edges])
        n_comp = inner.components([v for v in range(V) if v not in boundary_verts or inner.degree(v) > 0])
        n_segments = E - n_boundary_edges
    if isolated_bnodes:
        flags.append(f"{isolated_bnodes} boundary gradient-zero cluster(s) without a nodal arc")

    return NodalReport(
        n_interior_nodes=len(interior_ids),
        n_boundary_nodes=len(grad_zero_boundary) if boundary_in_nodal_set else 0,
        n_segments=n_segments,
        n_components=n_comp,
        n_domains_floodfill=d_ff,
        n_domains_euler=d_euler,
        graph_vertices=V,
        graph_edges=E,
        graph_components=C,
        boundary_in_nodal_set=boundary_in_nodal_set,
        degrees_interior=[g.degree(v) for v in interior_ids],
        degrees_boundary=[g.degree(v) for v in grad_zero_boundary] if boundary_in_nodal_set else [],
        flags=flags,
    )


def zero_set_polylines(f: SampledField) -> list[np.ndarray]:
    """Zero contour of the sampled field as a list of (x, y) vertex arrays."""
    import contourpy

    z = np.ma.masked_invalid(f.values)
    gen = contourpy.contour_generator(f.x, f.y, z)
    return [np.asarray(line) for line in gen.lines(0.0)]


def polylines_to_csv(f: SampledField, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["polyline", "x", "y"])
        for i, line in enumerate(zero_set_polylines(f)):
            for x, y in line:
                w.writerow([i, f"{x:.10g}", f"{y:.10g}"])
    return path


# ---------------------------------------------------------------------------
# Sturm bound


@dataclass(frozen=True)
class SturmResult:
    orthogonal: bool
    zero_count: int
    bound_satisfied: bool | None   # None when the bound does not apply
    max_low_mode: float


def count_sign_changes(samples, upsample: int = 8) -> int:
    """Cyclic sign changes of a periodic sequence after trigonometric upsampling."""
    v = np.asarray(samples, dtype=float)
    m = v.size
    if upsample > 1:
        c = np.fft.rfft(v)
        v = np.fft.irfft(c, n=upsample * m) * upsample
    s = np.sign(v)
    s = s[s != 0]
    if s.size == 0:
        return 0
    return int(np.sum(s != np.roll(s, 1)))


def sturm_zero_bound(samples, max_mode: int, tol: float = 1e-8) -> SturmResult:
    """Check orthogonality to modes 0..N and count zeros against the 2(N + 1) bound."""
    v = np.asarray(samples, dtype=float)
    if v.ndim != 1 or v.size < 8 * (max_mode + 1):
        raise ValueError(f"need at least {8 * (max_mode + 1)} uniform samples")
    c = np.abs(np.fft.rfft(v)) / v.size
    scale = max(float(np.abs(v).max()), np.finfo(float).tiny)
    low = float(c[: max_mode + 1].max())
    orthogonal = low <= tol * scale
    zeros = count_sign_changes(v)
    bound = (zeros >= 2 * (max_mode + 1)) if orthogonal else None
    return SturmResult(bool(orthogonal), zeros, bound, low)
