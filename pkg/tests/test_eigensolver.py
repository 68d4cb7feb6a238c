import numpy as np
import pytest
from scipy import special as sp

from schiffer_lab.curve import CurveSpec, build_curve
from schiffer_lab.eigensolver import (
    EigenSolverError,
    SolverConfig,
    evaluate_eigenfunction,
    interior_gram,
    solve_spectrum,
    trace_of,
    weyl_count,
)
from schiffer_lab.special import bessel_roots

# squared Bessel roots from mpmath (30 digits), listed with multiplicity
DISK_NEUMANN = [0.0, 3.3899577166718887, 3.3899577166718887, 9.3283632137463579, 9.3283632137463579,
                14.681970642123893, 17.649988519749641, 17.649988519749641, 28.276371248725661,
                28.276371248725661, 28.424282047372292, 28.424282047372292, 41.160133480153087]
DISK_DIRICHLET = [5.7831859629467845, 14.681970642123893, 14.681970642123893, 26.374616427163391,
                  26.374616427163391, 30.471262343662086]


def test_disk_neumann(disk_neumann):
    lam = disk_neumann.eigenvalues
    assert abs(lam[0]) <= 1e-9
    assert np.max(np.abs(lam[1:] - DISK_NEUMANN[1:]) / np.array(DISK_NEUMANN[1:])) <= 1e-8
    assert list(disk_neumann.multiplicities[:8]) == [1, 2, 2, 2, 2, 1, 2, 2]
    assert np.all(disk_neumann.residuals <= 1e-6)


def test_disk_dirichlet(disk_dirichlet):
    lam = disk_dirichlet.eigenvalues
    assert lam[0] > 0
    assert np.max(np.abs(lam - DISK_DIRICHLET) / np.array(DISK_DIRICHLET)) <= 1e-8
    assert list(disk_dirichlet.multiplicities) == [1, 2, 2, 2, 2, 1]


def test_neumann_constant_mode(disk_neumann, rng):
    z = 0.8 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
    v = evaluate_eigenfunction(disk_neumann, 0, z)
    assert np.ptp(v.real) <= 1e-12
    assert abs(abs(v[0]) - 1 / np.sqrt(np.pi)) <= 1e-6


def test_ground_state_profile(disk_dirichlet):
    r = np.linspace(0.0, 0.999, 200)
    u = evaluate_eigenfunction(disk_dirichlet, 0, r).real
    assert np.argmax(np.abs(u)) == 0
    ref = sp.j0(bessel_roots(0, "root_of_Jn", 1).roots[0] * r)
    corr = np.dot(u, ref) / np.linalg.norm(u) / np.linalg.norm(ref)
    assert abs(corr) >= 1 - 1e-8


def test_gradient_matches_finite_differences(disk_dirichlet, rng):
    z = 0.7 * np.sqrt(rng.random(64)) * np.exp(2j * np.pi * rng.random(64))
    h = 1e-5
    for idx in (0, 3):
        _, gx, gy = evaluate_eigenfunction(disk_dirichlet, idx, z, gradient=True)
        f = lambda p: evaluate_eigenfunction(disk_dirichlet, idx, p)
        fx = (f(z + h) - f(z - h)) / (2 * h)
        fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
        assert np.max(np.abs(gx - fx)) <= 1e-6
        assert np.max(np.abs(gy - fy)) <= 1e-6


def test_exterior_point_rejected(disk_dirichlet):
    with pytest.raises(ValueError, match="outside"):
        evaluate_eigenfunction(disk_dirichlet, 0, np.array([1.5]))


def test_traces(disk_dirichlet, ellipse_dirichlet):
    t = trace_of(disk_dirichlet, 0)
    assert np.max(np.abs(t.dirichlet)) <= 1e-7
    n = t.neumann.real
    assert np.all(n > 0) or np.all(n < 0)
    assert np.max(np.abs(trace_of(ellipse_dirichlet, 0).dirichlet)) <= 1e-7


def test_rescaled_disk_gives_omega(disk_neumann):
    """Rescaling the radial Neumann mode to mu = 1 gives a trace (const, 0)."""
    R = bessel_roots(0, "root_of_Jn_prime", 1).roots[0]
    factor = np.sqrt(disk_neumann.eigenvalues[5])
    assert factor == pytest.approx(R, rel=1e-9)
    big = build_curve(CurveSpec.circle(factor), 512)
    res = disk_neumann.rescaled(big, factor)
    assert res.eigenvalues[5] == pytest.approx(1.0, rel=1e-12)
    t = trace_of(res, 5)
    d = t.dirichlet.real
    assert np.ptp(d) <= 1e-7 * np.abs(d).max()
    assert np.max(np.abs(t.neumann)) <= 1e-7 * np.abs(d).max()
    # unit interior norm makes the constant J0(R) / (sqrt(pi) R |J0(R)|) in magnitude
    assert abs(d.mean()) == pytest.approx(1 / (np.sqrt(np.pi) * R), rel=1e-6)


def test_orthonormality(disk_dirichlet):
    G = disk_dirichlet.l2_gram(range(6))
    assert np.max(np.abs(G - np.eye(6))) <= 1e-8


def test_interior_gram_matches_green_identity(disk_dirichlet):
    # for Dirichlet eigenfunctions B(u_i, u_j; mu) = (lambda_i - mu) <u_i, u_j>
    mu = 10.0
    B = interior_gram(disk_dirichlet, range(3), mu)
    expected = np.diag(disk_dirichlet.eigenvalues[:3] - mu)
    assert np.max(np.abs(B - expected)) <= 1e-6


def test_rotation_and_scaling_invariance(ellipse_dirichlet):
    spec = CurveSpec.ellipse(1.2, 1.0).rotated(0.9).scaled(2.5)
    other = solve_spectrum(build_curve(spec, 512), "dirichlet", 3)
    assert np.max(np.abs(other.eigenvalues * 2.5 ** 2 - ellipse_dirichlet.eigenvalues)
                  / ellipse_dirichlet.eigenvalues) <= 1e-8


def test_csv_export(tmp_path, disk_dirichlet):
    lines = disk_dirichlet.to_csv(tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "index,value,multiplicity,residual"
    assert len(lines) == 7


def test_weyl_count_disk():
    c = build_curve(CurveSpec.circle(1.0), 128)
    assert weyl_count(c, 100.0, "dirichlet") == pytest.approx((np.pi * 100 - 2 * np.pi * 10) / (4 * np.pi))


def test_config_validation(unit_disk):
    with pytest.raises(ValueError):
        solve_spectrum(unit_disk, "dirichlet", 2, config=SolverConfig(angular_order=0))
    with pytest.raises(ValueError):
        solve_spectrum(unit_disk, "robin", 2)
    with pytest.raises(ValueError):
        solve_spectrum(unit_disk, "dirichlet", 0)


def test_non_star_domain_rejected():
    # crescent band around the origin, far from star-shaped about its centroid
    t = 2 * np.pi * np.arange(256) / 256
    z = np.exp(2.5j * np.sin(t)) * (1 + 0.25 * np.cos(t))
    c = np.fft.fft(z) / 256
    k = np.fft.fftfreq(256, 1 / 256).astype(int)
    spec = CurveSpec.from_triples([(kk, cc.real, cc.imag) for kk, cc in zip(k, c) if abs(cc) > 1e-13])
    with pytest.raises(EigenSolverError, match="star-shaped"):
        solve_spectrum(build_curve(spec, 256), "dirichlet", 1)


@pytest.mark.slow
def test_asymmetric_domain_raises_angular_order():
    egg = build_curve(CurveSpec.from_triples([(1, 1.0, 0.0), (2, 0.2, 0.0)]), 512)
    res = solve_spectrum(egg, "dirichlet", 2)
    assert res.basis.order > 24
    assert np.all(res.residuals <= 1e-6)
    # Faber-Krahn: lambda_1 exceeds that of the disk of equal area
    assert res.eigenvalues[0] > DISK_DIRICHLET[0] * np.pi / egg.area
