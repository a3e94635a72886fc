"""Independent reference computations used only by the tests."""

from __future__ import annotations

import math

import mpmath
import numpy as np

SQRT2 = math.sqrt(2.0)


def dense_p_integral(alpha, beta, X, w, p, phi, points=10_000_000, chunk=1_000_000):
    """Uniform trapezoid rule for int_1^sqrt2 t^p phi(t^2) e(alpha X^beta t^(2beta) + w t) dt.

    The amplitude vanishes to all orders at both ends, so the trapezoid rule
    converges spectrally once the oscillation is resolved; it shares no code
    with the adaptive Gauss-Legendre path.
    """
    h = (SQRT2 - 1.0) / points
    amp = alpha * X**beta
    re, im = [], []
    for start in range(1, points, chunk):
        idx = np.arange(start, min(start + chunk, points), dtype=float)
        t = 1.0 + h * idx
        cyc = amp * t ** (2 * beta) + w * t
        cyc -= np.floor(cyc)
        vals = t**p * phi(t * t) * np.exp(2j * math.pi * cyc)
        re.append(math.fsum(vals.real))
        im.append(math.fsum(vals.imag))
    return complex(math.fsum(re), math.fsum(im)) * h


def gamma_ratio_mp(r, k, dps=40):
    """Gamma(2ir + 2k + 1/2) / Gamma(2ir - 2k + 1/2) in arbitrary precision."""
    with mpmath.workdps(dps):
        z = 2j * mpmath.mpf(r) + mpmath.mpf(1) / 2
        return complex(mpmath.gamma(z + 2 * k) / mpmath.gamma(z - 2 * k))


def coeff_C_mp(r, k, dps=40):
    with mpmath.workdps(dps):
        denom = mpmath.mpf(2) ** (2 * k - 1) * (4 * mpmath.pi) ** (2 * k + 1) * mpmath.factorial(2 * k)
        return complex((-1) ** k * mpmath.mpmathify(gamma_ratio_mp(r, k, dps)) / denom)


def bump_mp(t):
    if not 1 < t < 2:
        return mpmath.mpf(0)
    u = 2 * t - 3
    return mpmath.exp(1 - 1 / (1 - u * u))


def dual_kernel(r, z):
    """-pi / sin(pi i r) * (J_{2ir}(z) - J_{-2ir}(z)) straight from mpmath's Bessel J."""
    nu = 2j * mpmath.mpmathify(r)
    return -mpmath.pi / mpmath.sin(mpmath.pi * 1j * mpmath.mpmathify(r)) * (
        mpmath.besselj(nu, z) - mpmath.besselj(-nu, z)
    )


def bessel_dual_integral(alpha, beta, X, n, D, r, panels=60, dps=20):
    """int phi(x/X) e(alpha x^beta) J_f(4 pi sqrt(n x / D)) dx over (X, 2X)."""
    with mpmath.workdps(dps):
        f = lambda x: bump_mp(x / X) * mpmath.expjpi(2 * alpha * x**beta) * dual_kernel(
            r, 4 * mpmath.pi * mpmath.sqrt(n * x / D)
        )
        return complex(mpmath.quad(f, mpmath.linspace(X, 2 * X, panels)))
