import numpy as np
import pytest

from schiffer_lab.curve import CurveSpec, TraceData, build_curve
from schiffer_lab.fields import FourierBesselField, PlaneWave
from schiffer_lab.special import bessel_j, bessel_roots
from schiffer_lab.traces import (
    TABLE_ENTRIES,
    GridMismatchError,
    apply_M,
    apply_Mbar,
    apply_N,
    omega_trace_by_composition,
    omega_trace_table,
    verify_commutation,
)

R = bessel_roots(0, "root_of_Jn_prime", 1).roots[0]


@pytest.fixture(scope="module")
def rdisk():
    return build_curve(CurveSpec.circle(R), 512)


@pytest.fixture(scope="module")
def omega():
    return FourierBesselField.real_mode(0, 1.0, amplitude=1.0 / bessel_j(0, R))


def test_M_on_omega(rdisk):
    out = apply_M(rdisk, TraceData(np.ones(rdisk.n), np.zeros(rdisk.n)))
    assert np.max(np.abs(out.dirichlet)) <= 1e-12
    assert np.max(np.abs(out.neumann - 1j * np.exp(1j * rdisk.theta))) <= 1e-12
    assert np.max(np.abs(out.real.neumann + np.sin(rdisk.theta))) <= 1e-12


def test_N_on_omega_disk(rdisk):
    out = apply_N(rdisk, TraceData(np.ones(rdisk.n), np.zeros(rdisk.n))).real
    assert out.sup() <= 1e-10


@pytest.mark.parametrize("op", [apply_M, apply_Mbar, apply_N])
def test_linearity_and_zero(op, ellipse12, rng):
    n = ellipse12.n
    z = TraceData(np.zeros(n), np.zeros(n))
    assert op(ellipse12, z).sup() == 0.0
    f = TraceData(rng.standard_normal(n), rng.standard_normal(n))
    g = TraceData(rng.standard_normal(n), rng.standard_normal(n))
    a, b = 0.7 - 0.2j, -1.3
    lhs = op(ellipse12, a * f + b * g)
    rhs = a * op(ellipse12, f) + b * op(ellipse12, g)
    assert lhs.sup_distance(rhs) <= 1e-9 * max(lhs.sup(), 1.0)


def test_grid_mismatch(ellipse12):
    with pytest.raises(GridMismatchError):
        apply_M(ellipse12, TraceData(np.ones(64), np.zeros(64)))


def test_conjugation_consistency(ellipse15):
    u = PlaneWave(0.9)
    t = u.trace(ellipse15).real
    assert apply_Mbar(ellipse15, t).sup_distance(apply_M(ellipse15, t).conj()) <= 1e-10


@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.2, 4.0])
def test_commutation_plane_waves(alpha, unit_disk, ellipse15):
    r = verify_commutation(unit_disk, PlaneWave(alpha))
    assert max(r["M"], r["Mbar"], r["N"]) <= 1e-9
    r = verify_commutation(ellipse15, PlaneWave(alpha))
    assert max(r["M"], r["Mbar"], r["N"]) <= 1e-8


def test_commutation_bessel_mode(ellipse12):
    r = verify_commutation(ellipse12, FourierBesselField.real_mode(2, 1.0, "cos"))
    assert max(r["M"], r["Mbar"], r["N"]) <= 1e-8
    with pytest.raises(ValueError):
        verify_commutation(ellipse12, PlaneWave(0.0, k=2.0))


def test_table_entries_on_rescaled_disk(rdisk):
    th = rdisk.theta
    wxx = omega_trace_table(rdisk, "wxx")
    assert np.max(np.abs(wxx.dirichlet + 0.5 * (1 - np.cos(2 * th)))) <= 1e-12
    assert np.max(np.abs(wxx.neumann + np.cos(2 * th) / R)) <= 1e-10
    assert omega_trace_table(rdisk, "Rw").sup() <= 1e-12


def test_wx_matches_bessel_differentiation(rdisk, omega):
    t = omega.dx().trace(rdisk)
    assert np.max(np.abs(t.dirichlet)) <= 1e-8
    assert np.max(np.abs(t.neumann + np.sin(rdisk.theta))) <= 1e-8


@pytest.mark.parametrize("which", TABLE_ENTRIES)
def test_table_vs_composition(which, ellipse15, oval):
    for c in (ellipse15, oval):
        a = omega_trace_table(c, which)
        b = omega_trace_by_composition(c, which)
        assert a.sup_distance(b) <= 1e-8


def test_unknown_entry(ellipse12):
    with pytest.raises(ValueError):
        omega_trace_table(ellipse12, "wz")
    with pytest.raises(ValueError):
        omega_trace_by_composition(ellipse12, "wz")
