"""Independent reference computations used only by the tests."""
import numpy as np


def ellipse_interior_B(u, v, a: float, b: float, n_radial: int = 40, n_angle: int = 256) -> complex:
    """iint grad u . grad conj(v) - u conj(v) over the ellipse x = a rho cos t, y = b rho sin t."""
    rho, w = np.polynomial.legendre.leggauss(n_radial)
    rho, w = 0.5 * (rho + 1), 0.5 * w
    t = 2 * np.pi * np.arange(n_angle) / n_angle
    R, T = np.meshgrid(rho, t, indexing="ij")
    z = a * R * np.cos(T) + 1j * b * R * np.sin(T)
    ux, uy = u.gradient(z)
    vx, vy = v.gradient(z)
    f = ux * np.conj(vx) + uy * np.conj(vy) - u.value(z) * np.conj(v.value(z))
    jac = a * b * R
    return complex(np.sum(f * jac * w[:, None]) * (2 * np.pi / n_angle))
