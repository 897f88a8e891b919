"""Independent reference values for the tests: adaptive quadrature of the
continuum integrals and closed-form special cases.  Nothing here touches the
discretization under test."""

import numpy as np
from scipy.integrate import quad


def volume_integral(fn, r_max=60.0):
    """4 pi int_0^inf fn(r) r^2 dr by adaptive quadrature."""
    val, _ = quad(lambda r: fn(r) * r * r, 0.0, r_max, limit=400)
    return 4.0 * np.pi * val


def newton_potential_exact(u_sq, r, r_max=60.0):
    """-(1/r) int_0^r s^2 u^2 ds - int_r^R s u^2 ds for a scalar radius r."""
    inner, _ = quad(lambda s: s * s * u_sq(s), 0.0, r, limit=400)
    outer, _ = quad(lambda s: s * u_sq(s), r, r_max, limit=400)
    if r == 0.0:
        outer, _ = quad(lambda s: s * u_sq(s), 0.0, r_max, limit=400)
        return -outer
    return -(inner / r + outer)


def exp_field_scalars(p_exponent, r_max=60.0):
    """Continuum scalars for u = e^{-r}: kinetic, mass, coulomb (q=m=1), power."""
    kinetic = volume_integral(lambda r: np.exp(-2.0 * r), r_max)
    mass = kinetic
    coulomb, _ = quad(
        lambda r: 4.0 * np.pi * r * r * np.exp(-2.0 * r) * newton_potential_exact(
            lambda s: np.exp(-2.0 * s), r, r_max
        ),
        0.0,
        r_max,
        limit=400,
    )
    power = volume_integral(lambda r: np.exp(-p_exponent * r), r_max)
    return kinetic, mass, coulomb, power
