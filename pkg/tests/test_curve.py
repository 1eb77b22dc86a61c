import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_tau import NumericalError, abel, rational
from hurwitz_tau.hyperelliptic import (
    HyperellipticCover, bergman, bergman_a_period, periods,
)
from hurwitz_tau.theta import theta

G1 = HyperellipticCover((-1.3, -0.4 + 0.1j, 0.7, 2.1))
G2 = HyperellipticCover((-1.3, -0.4 + 0.2j, 0.7, 2.1 - 0.3j, 2.5 + 1j, 1 + 2j))


@pytest.fixture(scope="module")
def d1():
    return periods(G1)


@pytest.fixture(scope="module")
def d2():
    return periods(G2)


def agm(a, b):
    for _ in range(40):
        a, b = (a + b) / 2, math.sqrt(a * b)
    return a


def ellipk(k):
    return math.pi / (2 * agm(1.0, math.sqrt(1 - k * k)))


def test_period_matrix_agm_oracle():
    r2 = math.sqrt(2)
    data = periods(HyperellipticCover((-r2, -1, 1, r2)))
    k = 1 / r2
    oracle = 2j * ellipk(math.sqrt(1 - k * k)) / ellipk(k)
    assert abs(data.omega[0, 0] - oracle) < 1e-10


def test_omega_symmetric(d2):
    assert np.max(np.abs(d2.omega - d2.omega.T)) < 1e-9
    assert np.all(np.linalg.eigvalsh(d2.omega.imag) > 0)


@pytest.mark.parametrize("lam", [0.4, 2.5])
def test_omega_scale_invariant(d2, lam):
    other = periods(HyperellipticCover(tuple(lam * np.asarray(G2.z))))
    assert np.max(np.abs(other.omega - d2.omega)) < 1e-9


def test_divisor_degrees():
    pts = abel.hyperelliptic_divisor(G2)
    assert sum(p.order for p in pts) == 2 * G2.genus - 2
    assert sorted(p.order for p in pts) == [-2, -2] + [1] * 6


def test_rational_divisors():
    c = rational.RationalCover((0.3, 0, 1))
    assert [(p.kind, p.order) for p in c.divisor] == [("critical", 1), ("pole", -3)]
    cub = rational.RationalCover((0, -3, 0, 1))
    crit = sorted((p.location.real, p.extra["value"].real, p.order) for p in cub.divisor if p.kind == "critical")
    assert np.allclose(crit, [(-1, 2, 1), (1, -2, 1)])
    assert [p.order for p in cub.divisor if p.kind == "pole"] == [-4]


def test_bergman_symmetry(d2):
    rng = np.random.default_rng(3)
    for _ in range(5):
        xp, xq = rng.normal(size=2) * 1.5 + 1j * rng.normal(size=2)
        yp, yq = G2.y(xp), G2.y(xq)
        assert abs(bergman(d2, xp, yp, xq, yq) - bergman(d2, xq, yq, xp, yp)) < 1e-8


def test_bergman_a_periods_vanish(d1):
    xq = 0.3 + 1.2j
    assert np.max(np.abs(bergman_a_period(d1, xq, G1.y(xq)))) < 1e-9


def test_genus0_bergman():
    assert rational.bergman(1.0, 3.0) == 0.25
    assert rational.projective_connection(0.7) == 0


def _lattice_residual(v, omega):
    im = np.linalg.solve(omega.imag, np.imag(v))
    m = np.rint(im)
    rest = v - omega @ m
    return np.max(np.abs(rest - np.rint(rest.real)))


def test_riemann_constants_g1(d1):
    x = 0.2 + 0.9j
    K, Z, Zp = abel.riemann_constants(d1, x, G1.y(x))
    assert _lattice_residual(K - (1 + d1.omega[0]) / 2, d1.omega) < 1e-8


def test_riemann_constants_theta_vanishing(d2):
    # K + A^x(P) lies on the theta divisor for every point P (degree g-1 = 1)
    x = 0.3 + 0.8j
    K, _, _ = abel.riemann_constants(d2, x, G2.y(x))
    p = -0.5 + 1.4j
    v, _ = abel.integrate(d2, x, G2.y(x), p)
    assert abs(theta(K + v, d2.omega)) < 1e-8


@pytest.mark.parametrize("x", [0.2 + 0.9j, -1.0 - 0.8j])
def test_shift_vectors_g1(d1, x):
    Z, Zp, res = abel.shift_vectors(d1, x, G1.y(x))
    assert res <= 1e-8
    assert np.all(np.asarray(Z) == np.rint(Z))


def test_prime_form_genus0():
    assert rational.prime_form(2, 0) == -2
    assert rational.prime_form(1.5, 1.5) == 0


def test_prime_form_powers_genus0():
    c = rational.RationalCover((0.3, 0, 1))
    p0, pinf = c.divisor
    vals = [8 * rational.log_prime_form_at(c, w, p0) - 24 * rational.log_prime_form_at(c, w, pinf)
            for w in (0.4 + 0.1j, -1.2 + 0.7j, 2.0 - 1.0j)]
    # defined modulo pi i; compare the exponentials
    assert np.allclose(np.exp(vals), np.exp(vals[0]), rtol=1e-8)


def test_prime_form_antisymmetric(d2):
    x1, x2 = 0.3 + 0.8j, -0.6 + 1.5j
    y1, y2 = G2.y(x1), G2.y(x2)
    e12 = abel.prime_form(d2, x1, y1, x2, y2)
    e21 = abel.prime_form(d2, x2, y2, x1, y1)
    assert abs(e12 + e21) < 1e-9 * abs(e12)


def test_prime_form_delta_independent(d2):
    x1, x2 = 0.3 + 0.8j, -0.6 + 1.5j
    y1, y2 = G2.y(x1), G2.y(x2)
    deltas = abel.odd_characteristics(d2)
    vals = [abel.prime_form(d2, x1, y1, x2, y2, delta=dl[0]) for dl in deltas[:3]]
    for v in vals[1:]:
        assert abs(v - vals[0]) < 1e-8 * abs(vals[0])


def test_schwarzian_square():
    c = rational.RationalCover((0, 0, 1))
    w = np.array([0.5 + 0.2j, -1.3, 2j])
    assert np.allclose(c.schwarzian(w), -3 / (2 * w ** 2), rtol=1e-12)


def test_schwarzian_moebius_zero():
    c = rational.RationalCover((1, 2), (3, 1))
    assert np.allclose(c.schwarzian(np.array([0.1, 1 + 1j])), 0, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_schwarzian_moebius_invariance(seed):
    rng = np.random.default_rng(seed)
    c = rational.RationalCover((0.2, -3, 0.5, 1))
    a, b, cc = rng.normal(size=3) + 1j * rng.normal(size=3)
    d = (1 + b * cc) / a
    g = c.moebius(a, b, cc, d)
    w = rng.normal(size=4) + 1j * rng.normal(size=4)
    s0, s1 = c.schwarzian(w), g.schwarzian(w)
    assert np.all(np.abs(s0 - s1) <= 1e-10 * np.maximum(1, np.abs(s0)))


def test_schwarzian_degenerate_point():
    c = rational.RationalCover((0, 0, 1))
    with pytest.raises(NumericalError, match="critical point"):
        c.schwarzian(np.array([0j]))


def test_fay_constant_g1(d1):
    K = (1 + d1.omega[0]) / 2
    target = complex(abel.theta_deriv(K, d1.omega, None, [np.ones(1)]))
    for x in (0.2 + 0.9j, -1.0 - 0.8j, 1.5 + 0.4j):
        y = G1.y(x)
        Kx = abel.riemann_constants_integral(d1, x, y)
        assert abs(Kx[0] - K) < 1e-12
        W, C = abel.fay_C(d1, x, y, K=Kx)
        assert abs(W - d1.holomorphic(x, y)[0]) < 1e-12 * abs(W)
        assert abs(C - target) < 1e-8 * abs(target)


def test_derivatives_vs_nested_fd(d2):
    x = 0.3 + 0.8j
    y = G2.y(x)
    der = abel.derivatives(d2, x, y, 2)
    h = 1e-4
    om = lambda dx: d2.holomorphic(x + dx, G2.continue_y(x, y, x + dx))
    fd = (om(h) - om(-h)) / (2 * h)
    fd2 = (om(h / 2) - om(-h / 2)) / h
    assert np.max(np.abs((4 * fd2 - fd) / 3 - der[:, 1])) < 1e-6 * np.max(np.abs(der[:, 1]))
