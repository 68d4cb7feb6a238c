import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schiffer_lab.curve import (
    CurveError,
    CurveSpec,
    TraceData,
    build_curve,
    fourier_interpolate,
    geometric_trace_factory,
    spectral_derivative,
)

# perimeters by 30-digit adaptive quadrature of |z'(t)|
PERIMETER_12 = 6.9257911958096814981
PERIMETER_15 = 7.9327197946452948957


def test_unit_circle(unit_disk):
    c = unit_disk
    assert c.length == pytest.approx(2 * np.pi, abs=1e-13)
    assert np.max(np.abs(c.theta - (c.s + np.pi / 2))) <= 1e-12
    assert np.max(np.abs(c.kappa + 1.0)) <= 1e-11
    assert c.is_circle() and c.is_strictly_convex() and c.is_centrally_symmetric()


def test_rescaled_disk_curvature():
    R = 3.8317059702075123
    c = build_curve(CurveSpec.circle(R), 256)
    assert c.length == pytest.approx(2 * np.pi * R, rel=1e-14)
    assert np.max(np.abs(c.kappa + 1 / R)) <= 1e-11


@pytest.mark.parametrize("a,ref", [(1.2, PERIMETER_12), (1.5, PERIMETER_15)])
def test_ellipse_perimeter(a, ref):
    assert build_curve(CurveSpec.ellipse(a, 1.0), 512).length == pytest.approx(ref, abs=1e-10)


def test_unit_speed_and_uniform_arclength(ellipse15):
    c = ellipse15
    dz = c.spec.dz(c.t)
    # chord lengths are not the invariant; the parameter map is: ds/dt = |z'(t)|
    assert np.allclose(np.diff(c.s), c.length / c.n)
    zs = spectral_derivative(c.z, c.length)
    assert np.max(np.abs(np.abs(zs) - 1.0)) <= 1e-10
    assert np.max(np.abs(zs - dz / np.abs(dz))) <= 1e-10
    # arclength of each sub-interval by Gauss-Legendre on |z'(t)|
    t = np.append(c.t, c.t[0] + 2 * np.pi)
    x, w = np.polynomial.legendre.leggauss(20)
    for a, b in zip(t[:-1:37], t[1::37]):
        tt = 0.5 * (b - a) * x + 0.5 * (a + b)
        arc = 0.5 * (b - a) * np.sum(w * np.abs(c.spec.dz(tt)))
        assert abs(arc - c.length / c.n) <= 1e-8 * c.length / c.n


def test_theta_lift_and_curvature(ellipse15):
    c = ellipse15
    wrap = c.theta[0] + 2 * np.pi - (c.theta[-1] + (c.theta[1] - c.theta[0]))
    assert abs(wrap) < 1e-2
    dtheta = spectral_derivative(c.theta - 2 * np.pi * c.s / c.length, c.length) + 2 * np.pi / c.length
    assert np.max(np.abs(c.kappa + dtheta)) <= 1e-10
    assert np.all(c.kappa < 0)


def test_ellipse_curvature_closed_form(ellipse12):
    a, b = 1.2, 1.0
    t = ellipse12.t
    k_exact = a * b / (a * a * np.sin(t) ** 2 + b * b * np.cos(t) ** 2) ** 1.5
    assert np.max(np.abs(ellipse12.kappa + k_exact)) <= 1e-10


def test_area_and_centroid(ellipse12):
    assert ellipse12.area == pytest.approx(np.pi * 1.2, rel=1e-13)
    assert abs(ellipse12.centroid) <= 1e-13


def test_geometric_traces(unit_disk, ellipse12):
    assert np.max(np.abs(geometric_trace_factory(unit_disk, "drsq_ds"))) <= 1e-12
    c2 = geometric_trace_factory(unit_disk, "cos_2theta")
    assert np.max(np.abs(c2 + np.cos(2 * unit_disk.s))) <= 1e-12
    d = geometric_trace_factory(ellipse12, "drsq_ds")
    h = ellipse12.length / ellipse12.n
    r2 = ellipse12.r2
    r = lambda k: np.roll(r2, -k)
    # sixth-order central difference on the arclength grid
    fd6 = (45 * (r(1) - r(-1)) - 9 * (r(2) - r(-2)) + (r(3) - r(-3))) / (60 * h)
    assert np.max(np.abs(d - fd6)) <= 1e-8
    with pytest.raises(ValueError):
        geometric_trace_factory(ellipse12, "nope")


def test_rejections():
    with pytest.raises(CurveError, match="self-intersection"):
        build_curve(CurveSpec.from_triples([(1, 1.0, 0.0), (3, 0.6, 0.0)]), 256)
    with pytest.raises(CurveError, match="speed"):
        build_curve(CurveSpec.from_triples([(1, 1.0, 0.0), (-1, 1.0, 0.0)]), 256)
    with pytest.raises(CurveError):
        build_curve(CurveSpec.circle(1.0), 63)
    with pytest.raises(CurveError):
        build_curve(CurveSpec.from_triples([(-1, 1.0, 0.0)]), 128)


def test_symmetry_flags(oval, ellipse12):
    assert oval.is_centrally_symmetric() and oval.is_strictly_convex() and not oval.is_circle()
    egg = build_curve(CurveSpec.from_triples([(1, 1.0, 0.0), (2, 0.05, 0.0)]), 256)
    assert not egg.is_centrally_symmetric()
    # central symmetry: theta(s + L/2) = theta(s) + pi
    half = oval.n // 2
    assert np.max(np.abs(np.roll(oval.theta, -half)[:half] - oval.theta[:half] - np.pi)) <= 1e-10


def test_theta_resample(ellipse12):
    th, v = ellipse12.theta_resample(ellipse12.kappa, 300)
    assert np.allclose(np.diff(th), 2 * np.pi / 300)
    a, b = 1.2, 1.0
    # ellipse curvature as a function of the tangent angle
    phi = th - np.pi / 2
    k_exact = (a * a * np.cos(phi) ** 2 + b * b * np.sin(phi) ** 2) ** 1.5 / (a * a * b * b)
    assert np.max(np.abs(v + k_exact)) <= 1e-10
    star = build_curve(CurveSpec.from_triples([(1, 1.0, 0.0), (-4, 0.1, 0.0)]), 256)
    with pytest.raises(CurveError):
        star.theta_resample(star.kappa, 64)


def test_contains(unit_disk):
    pts = np.array([0.0, 0.5 + 0.5j, 0.99, 1.01, 2j])
    assert list(unit_disk.contains(pts)) == [True, True, True, False, False]
    assert not unit_disk.contains(np.array([0.999]), margin=0.01)[0]


def test_fourier_interpolate_reproduces_samples(ellipse12):
    c = ellipse12
    assert np.allclose(fourier_interpolate(c.r2, c.length, c.s), c.r2, atol=1e-13)


def test_trace_data_algebra():
    a = TraceData(np.ones(8), np.zeros(8))
    b = TraceData(np.arange(8.0), np.ones(8) * 1j)
    assert (a + b - b).sup_distance(a) == 0.0
    assert (2 * a).sup() == 2.0
    assert b.conj().neumann[0] == -1j
    with pytest.raises(ValueError):
        TraceData(np.ones(8), np.ones(7))


def test_csv_export(tmp_path, ellipse12):
    p = ellipse12.to_csv(tmp_path / "c.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "s,x,y,theta,kappa,r2" and len(lines) == ellipse12.n + 1


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 2 * np.pi), st.floats(0.3, 3.0))
def test_invariants_under_rotation_and_scaling(angle, factor):
    spec = CurveSpec.from_triples([(1, 1.0, 0.0), (-1, 0.2, 0.0), (2, 0.04, 0.01)])
    base = build_curve(spec, 128)
    moved = build_curve(spec.rotated(angle).scaled(factor), 128)
    assert moved.length == pytest.approx(factor * base.length, rel=1e-12)
    assert np.max(np.abs(moved.kappa * factor - base.kappa)) <= 1e-9
    assert np.max(np.abs(np.angle(np.exp(1j * (moved.theta - base.theta - angle))))) <= 1e-9
