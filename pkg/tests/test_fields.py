import numpy as np
import pytest
from scipy import special as sp

from schiffer_lab.fields import FourierBesselField, PlaneWave, trace_of_rotation


def _laplacian_fd(f, z, h=1e-3):
    v = lambda p: f.value(p)
    return (v(z + h) + v(z - h) + v(z + 1j * h) + v(z - 1j * h) - 4 * v(z)) / h ** 2


@pytest.mark.parametrize("field", [
    PlaneWave(0.4, k=1.3),
    FourierBesselField.real_mode(2, 1.7, "cos"),
    FourierBesselField({0: 0.3, 1: 1j, -3: 0.5}, k=2.1),
])
def test_helmholtz_equation(field, rng):
    z = rng.uniform(-1, 1, 20) + 1j * rng.uniform(-1, 1, 20)
    lap = _laplacian_fd(field, z)
    assert np.max(np.abs(lap + field.k ** 2 * field.value(z))) <= 1e-5


def test_real_mode_values(rng):
    r = rng.uniform(0.01, 3, 30)
    phi = rng.uniform(0, 2 * np.pi, 30)
    z = r * np.exp(1j * phi)
    for m in (0, 1, 2, 3):
        f = FourierBesselField.real_mode(m, 1.4, "cos", amplitude=2.0)
        assert np.allclose(f.value(z), 2.0 * sp.jv(m, 1.4 * r) * np.cos(m * phi), atol=1e-13)
        if m:
            g = FourierBesselField.real_mode(m, 1.4, "sin")
            assert np.allclose(g.value(z), sp.jv(m, 1.4 * r) * np.sin(m * phi), atol=1e-13)
    with pytest.raises(ValueError):
        FourierBesselField.real_mode(0, 1.0, "sin")
    with pytest.raises(ValueError):
        FourierBesselField.real_mode(1, 1.0, "tan")


@pytest.mark.parametrize("field", [PlaneWave(1.1), FourierBesselField.real_mode(3, 1.0, "sin")])
def test_gradient_against_finite_differences(field, rng):
    z = rng.uniform(-0.7, 0.7, 16) + 1j * rng.uniform(-0.7, 0.7, 16)
    h = 1e-5
    fx = (field.value(z + h) - field.value(z - h)) / (2 * h)
    fy = (field.value(z + 1j * h) - field.value(z - 1j * h)) / (2 * h)
    gx, gy = field.gradient(z)
    assert np.max(np.abs(gx - fx)) <= 1e-8
    assert np.max(np.abs(gy - fy)) <= 1e-8


def test_rotation_field_matches_direct_trace(ellipse12):
    f = FourierBesselField({0: 1.0, 2: 0.4 - 0.2j, -1: 0.3j}, k=1.0)
    direct = trace_of_rotation(f, ellipse12)
    assert f.rotation().trace(ellipse12).sup_distance(direct) <= 1e-12
    with pytest.raises(ValueError):
        FourierBesselField({0: 1.0}, center=0.1).rotation()


def test_combine_type_checks():
    with pytest.raises(TypeError):
        PlaneWave(0.1).combine(PlaneWave(0.2), 1, 1)
    with pytest.raises(TypeError):
        FourierBesselField({0: 1}, k=1).combine(FourierBesselField({0: 1}, k=2), 1, 1)
