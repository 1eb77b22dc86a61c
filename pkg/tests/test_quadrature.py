import math

import numpy as np
import pytest

from hurwitz_tau.hyperelliptic import HyperellipticCover
from hurwitz_tau.quadrature import adaptive_gl, circle_mean, segment_sqrt_integral


def test_adaptive_gl_polynomial_and_peak():
    assert adaptive_gl(lambda t: np.atleast_2d(t ** 5), 0, 2, 1e-14)[0] == pytest.approx(64 / 6, rel=1e-14)
    # narrow Lorentzian: arctan antiderivative
    eps = 1e-3
    got = adaptive_gl(lambda t: np.atleast_2d(eps / (t * t + eps * eps)), -1, 1, 1e-13)[0]
    assert got == pytest.approx(2 * math.atan(1 / eps), rel=1e-12)


def test_segment_sqrt_arcsine():
    # int_{-1}^{1} dx / sqrt(1 - x^2) = pi; the kernel receives sin(t) * integrand = 1 / h
    got = segment_sqrt_integral(lambda x, t: np.atleast_2d(np.ones_like(x) / 1.0), -1, 1, 1e-14)
    assert got[0] == pytest.approx(math.pi, rel=1e-14)


def test_circle_mean_residue():
    assert abs(circle_mean(lambda z: 3 / z * z, 0.5, 0.1) - 3) < 1e-14
    assert abs(circle_mean(lambda z: (z - 0.5) ** -2 * (z - 0.5), 0.5, 0.1)) < 1e-13


def test_cut_integral_near_cluster():
    # a cut whose endpoint sits next to two nearly coincident branch points
    eps = 1e-4
    c = HyperellipticCover((-eps + 0.1j * eps, eps - 0.2j * eps, (2 + 0.3j) * eps, 3 - 0.1j, 4 + 0.2j, 5))
    a = c.a_periods(c.monomials, 1e-13)
    coarse = c.a_periods(c.monomials, 1e-10)
    assert np.all(np.isfinite(a)) and np.max(np.abs(a - coarse)) < 1e-9 * np.max(np.abs(a))
