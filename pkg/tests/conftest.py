import numpy as np
import pytest

from schiffer_lab.curve import CurveSpec, build_curve
from schiffer_lab.eigensolver import solve_spectrum

# acceptance criterion number -> (passed, detail); filled by test_acceptance.py
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def unit_disk():
    return build_curve(CurveSpec.circle(1.0), 512)


@pytest.fixture(scope="session")
def ellipse12():
    return build_curve(CurveSpec.ellipse(1.2, 1.0), 512)


@pytest.fixture(scope="session")
def ellipse15():
    return build_curve(CurveSpec.ellipse(1.5, 1.0), 512)


@pytest.fixture(scope="session")
def oval():
    """Strictly convex and centrally symmetric (odd modes only)."""
    return build_curve(CurveSpec.from_triples([(1, 1.0, 0.0), (-1, 0.12, 0.0), (3, 0.02, 0.0)], "oval"), 512)


@pytest.fixture(scope="session")
def disk_neumann(unit_disk):
    return solve_spectrum(unit_disk, "neumann", 13)


@pytest.fixture(scope="session")
def disk_dirichlet(unit_disk):
    return solve_spectrum(unit_disk, "dirichlet", 6)


@pytest.fixture(scope="session")
def ellipse_dirichlet(ellipse12):
    return solve_spectrum(ellipse12, "dirichlet", 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
