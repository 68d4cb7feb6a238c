import numpy as np
import pytest
from scipy import special as sp

from schiffer_lab.special import BesselDomainError, bessel_j, bessel_j_prime, bessel_roots

# first roots, evaluated with mpmath at 30 digits
J0_ROOT = 2.4048255576957727686
J0P_ROOT = 3.8317059702075123156
J1P_ROOT = 1.8411837813406593026
J3P_ROOT = 4.2011889412105284962


def test_j0_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


def test_known_zeros():
    assert abs(bessel_j(0, J0_ROOT)) <= 1e-12
    assert abs(bessel_j(1, J0P_ROOT)) <= 1e-10
    assert bessel_j_prime(0, 0.0) == 0.0
    assert abs(bessel_j_prime(0, J0P_ROOT)) <= 1e-10
    assert abs(bessel_j_prime(1, J1P_ROOT)) <= 1e-10


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12, 30, 50])
def test_matches_scipy_across_regimes(n):
    x = np.concatenate([np.linspace(0, 2, 17), np.linspace(2.1, 80, 200), [150.0, 900.0, 5000.0]])
    ref = sp.jv(n, x)
    got = bessel_j(n, x)
    assert np.max(np.abs(got - ref)) <= 1e-12


@pytest.mark.parametrize("n", [0, 1, 4])
def test_derivative_matches_scipy(n):
    x = np.linspace(0.0, 40.0, 301)
    assert np.max(np.abs(bessel_j_prime(n, x) - sp.jvp(n, x))) <= 1e-12


def test_scalar_and_array_shapes():
    assert isinstance(bessel_j(2, 1.5), float)
    assert bessel_j(2, np.ones((3, 4))).shape == (3, 4)


@pytest.mark.parametrize("n,x", [(-1, 1.0), (51, 1.0), (1.5, 1.0), (0, -0.1), (0, 2e4), (0, np.nan)])
def test_domain_errors(n, x):
    with pytest.raises(BesselDomainError):
        bessel_j(n, x)


def test_root_tables():
    assert bessel_roots(0, "root_of_Jn", 1).roots[0] == pytest.approx(J0_ROOT, abs=1e-13)
    assert bessel_roots(0, "root_of_Jn_prime", 1).roots[0] == pytest.approx(J0P_ROOT, abs=1e-13)
    assert bessel_roots(3, "root_of_Jn_prime", 1).roots[0] == pytest.approx(J3P_ROOT, abs=1e-13)
    assert bessel_roots(3, "root_of_Jn_prime", 1).roots[0] ** 2 == pytest.approx(17.649988519749641, rel=1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 7])
@pytest.mark.parametrize("kind,ref", [("root_of_Jn", sp.jn_zeros), ("root_of_Jn_prime", sp.jnp_zeros)])
def test_roots_against_scipy(n, kind, ref):
    tab = bessel_roots(n, kind, 8)
    expected = ref(n, 8)
    assert np.allclose(tab.roots, expected, rtol=1e-12)
    assert np.all(np.diff(tab.roots) > 0)
    assert np.all(tab.residuals() <= 1e-12)


def test_roots_spacing_tends_to_pi():
    gaps = np.diff(bessel_roots(0, "root_of_Jn", 40).roots)
    assert np.all(np.abs(gaps[-10:] - np.pi) < 1e-3)


def test_root_table_csv(tmp_path):
    p = bessel_roots(1, "root_of_Jn", 3).to_csv(tmp_path / "r.csv")
    lines = p.read_text().splitlines()
    assert len(lines) == 4


def test_bad_root_arguments():
    with pytest.raises(ValueError):
        bessel_roots(0, "zeros", 3)
    with pytest.raises(ValueError):
        bessel_roots(0, "root_of_Jn", 0)
