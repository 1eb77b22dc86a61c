"""Abel map, Riemann constants, prime form and Wronskian on hyperelliptic curves.

Integration paths are straight segments in the ``x``-plane along which
``y`` is continued analytically (never re-evaluated on a fixed sheet), so
a path may cross the square-root cuts freely.  Endpoints at branch points
and at the two points over infinity are handled in their natural
parameters ``sqrt(x - z_k)`` and ``1/x``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from . import InconsistentDataError, NumericalError
from .hyperelliptic import PeriodData
from .quadrature import adaptive_gl, gauss_legendre
from .theta import (ThetaCharacteristic, enumerate_characteristics, theta, theta_deriv,
                    theta_gradient)


@dataclass(frozen=True)
class DivisorPoint:
    """Point of the divisor of ``df``.

    ``kind`` is ``"branch"`` (``index`` = branch point), ``"infinity"``
    (``index`` = +1/-1 sheet, ``y ~ +-x^{g+1}``), ``"critical"`` or ``"pole"``
    for rational covers (``location`` in the coordinate ``w``, ``None`` for
    ``w = infinity``).
    """

    kind: str
    index: int
    order: int
    location: complex | None = None
    parameter: str = ""


def hyperelliptic_divisor(cover) -> list[DivisorPoint]:
    pts = [DivisorPoint("branch", k, 1, cover.z[k], "sqrt(x - z_k)") for k in range(cover.n)]
    pts += [DivisorPoint("infinity", s, -2, None, "1/x") for s in (1, -1)]
    return pts


# -- path machinery -------------------------------------------------------------

def _min_branch_distance(cover, x):
    return np.min(np.abs(np.asarray(x)[..., None] - cover.z), axis=-1)


def _path_clear(cover, a, b, exclude=()):
    # a branch point may sit close to an endpoint but not close to the interior
    ab = b - a
    for k, z in enumerate(cover.z):
        if k in exclude:
            continue
        t = np.clip(((z - a) * np.conj(ab)).real / abs(ab) ** 2, 0, 1)
        if abs(z - (a + t * ab)) < 0.3 * min(abs(z - a), abs(z - b)):
            return False
    return True


def _track(cover, x0, y0, x1):
    """Points along ``[x0, x1]`` with ``y`` continued from ``y0``.

    Each step is half the distance to the nearest branch point, so
    consecutive points lie well inside a disc where ``y`` is analytic.
    """
    scale = max(1.0, float(np.max(np.abs(cover.z))))
    length = abs(x1 - x0)
    xs, ys, s = [complex(x0)], [complex(y0)], 0.0
    while s < 1.0:
        d = float(_min_branch_distance(cover, xs[-1]))
        if d < 1e-13 * scale:
            raise NumericalError("path passes through a branch point")
        s = min(1.0, s + 0.5 * d / length)
        x = x0 + s * (x1 - x0)
        ys.append(complex(cover.continue_y(xs[-1], ys[-1], x)))
        xs.append(complex(x))
        if len(xs) > 100000:
            raise NumericalError("path passes through a branch point")
    return np.array(xs), np.array(ys)


def _segment(data: PeriodData, x0, y0, x1, funcs, order: int = 24):
    cover = data.cover
    xs, ys = _track(cover, x0, y0, x1)
    nodes, weights = gauss_legendre(order)
    total = 0
    for k in range(len(xs) - 1):
        a, b = xs[k], xs[k + 1]
        x = (a + b) / 2 + (b - a) / 2 * nodes
        y = cover.continue_y(a, ys[k], x)
        total = total + (np.atleast_2d(funcs(x)) / y) @ weights * (b - a) / 2
    return total, ys[-1]


def _route(cover, x0, x1, exclude=()):
    if _path_clear(cover, x0, x1, exclude):
        return [x0, x1]
    for frac in (0.5, -0.5, 1.0, -1.0, 2.0, -2.0):
        w = (x0 + x1) / 2 + frac * 1j * (x1 - x0)
        if _path_clear(cover, x0, w, exclude) and _path_clear(cover, w, x1, exclude):
            return [x0, w, x1]
    raise NumericalError("no clear integration path")


def integrate(data: PeriodData, x0, y0, x1, funcs=None):
    """``int_{(x0,y0)}^{x1} funcs(x) dx / y`` (default: the normalized
    differentials) and the continued value of ``y`` at ``x1``."""
    funcs = funcs or (lambda x: np.tensordot(data.normalizer, data.cover.monomials(x), axes=1))
    pts = _route(data.cover, x0, x1)
    total, y = 0, y0
    for a, b in zip(pts, pts[1:]):
        part, y = _segment(data, a, y, b, funcs)
        total = total + part
    return total, y


def _omega_funcs(data):
    return lambda x: np.tensordot(data.normalizer, data.cover.monomials(x), axes=1)


def abel_to_branch(data: PeriodData, x0, y0, k: int) -> np.ndarray:
    cover = data.cover
    zk = cover.z[k]
    dk = np.min(np.abs(np.delete(cover.z, k) - zk))
    xm = zk + 0.25 * dk * (x0 - zk) / abs(x0 - zk)
    pts = _route(cover, x0, xm, exclude=(k,))
    total, y = 0, y0
    for a, b in zip(pts, pts[1:]):
        part, y = _segment(data, a, y, b, _omega_funcs(data))
        total = total + part
    zeta_m = np.sqrt(xm - zk)
    if abs(cover.branch_chart(k, zeta_m)[1] - y) > abs(cover.branch_chart(k, -zeta_m)[1] - y):
        zeta_m = -zeta_m
    # in the chart x = z_k + zeta^2, dx / y = 2 dzeta / h(zeta)
    def kern(s):
        zeta = zeta_m * (1 - s)
        x, yy = cover.branch_chart(k, zeta)
        return -zeta_m * _omega_funcs(data)(x) * 2 * zeta / yy

    return total + adaptive_gl(kern, 0.0, 1.0, data.tol)


def _infinity_chart(cover, t, sheet):
    s = np.zeros_like(t)
    for zk in cover.z:
        s = s + np.log1p(-zk * t)
    return sheet * np.exp(0.5 * s)   # y = sheet * t^{-(g+1)} * this


def _chart_exit(data, k, zeta_m):
    """``int`` from branch point ``z_k`` to ``x = z_k + zeta_m^2`` in the chart, and ``y`` there."""
    cover = data.cover

    def kern(s):
        zeta = zeta_m * s
        x, yy = cover.branch_chart(k, zeta)
        return zeta_m * _omega_funcs(data)(x) * 2 * zeta / yy

    return adaptive_gl(kern, 0.0, 1.0, data.tol), cover.branch_chart(k, zeta_m)[1]


def branch_to_infinity(data: PeriodData, k: int, sheet: int) -> np.ndarray:
    """``int_{z_k}^{infinity_sheet} omega``; the sheet is chosen by the direction
    in which the path leaves ``z_k``."""
    cover = data.cover
    g = cover.genus
    zk = cover.z[k]
    dk = np.min(np.abs(np.delete(cover.z, k) - zk))
    direction = zk / abs(zk) if abs(zk) > 1e-12 else 1.0
    xm = zk + 0.25 * dk * direction
    part1, ym = _chart_exit(data, k, np.sqrt(xm - zk))
    R = 2 * np.max(np.abs(cover.z)) + 1
    X = R * direction
    part2, yX = integrate(data, xm, ym, X)
    t0 = 1 / X
    e0 = _infinity_chart(cover, t0, 1) * t0 ** -(g + 1)
    reached = 1 if abs(e0 - yX) < abs(e0 + yX) else -1

    def kern(s):
        t = t0 * (1 - s)
        mono = np.stack([t ** (g - 1 - i) for i in range(g)])
        # x^i dx / y = -t^{g-1-i} dt / (sheet * e(t))
        return t0 * (data.normalizer @ mono) / _infinity_chart(cover, t, reached)

    total = part1 + part2 + adaptive_gl(kern, 0.0, 1.0, data.tol)
    # leaving z_k with -zeta flips y along the whole path
    return total if reached == sheet else -total


def abel_to_infinity(data: PeriodData, x0, y0, sheet: int) -> np.ndarray:
    return abel_to_branch(data, x0, y0, 0) + branch_to_infinity(data, 0, sheet)


def abel_to_divisor_point(data, x0, y0, p: DivisorPoint) -> np.ndarray:
    if p.kind == "branch":
        return abel_to_branch(data, x0, y0, p.index)
    if p.kind == "infinity":
        return abel_to_infinity(data, x0, y0, p.index)
    raise InconsistentDataError(f"unsupported divisor point {p.kind}")


# -- Riemann constants and shift vectors ------------------------------------------

def riemann_constants_integral(data: PeriodData, x0, y0) -> np.ndarray:
    """Vector of Riemann constants with basepoint ``(x0, y0)`` from the loop integrals.

    Uses ``K_i = 1/2 + Omega_ii/2 - sum_{j != i} oint_{a_j} omega_j(y) int_x^y omega_i``
    (loop index ``j``, integrand ``omega_i``).  Collapsing ``a_j`` onto its
    cut, the double integral reduces to ``int_x^{z_{2j}} omega_i`` since
    the integrand changes sign between the two banks.  The straight path from
    ``x`` must not cross the canonical loops, so the result is only reliable
    for basepoints near the cuts; :func:`riemann_constants` does not need this.
    """
    g = data.genus
    K = 0.5 + 0.5 * np.diag(data.omega).astype(complex)
    for j in range(g):
        v = abel_to_branch(data, x0, y0, 2 * j)
        for i in range(g):
            if i != j:
                K[i] -= v[i]
    return K


def divisor_images(data: PeriodData, x0, y0) -> list[np.ndarray]:
    return [abel_to_divisor_point(data, x0, y0, p) for p in hyperelliptic_divisor(data.cover)]


def _probe_divisors(data, x0, y0, count=3):
    g = data.genus
    r = 0.3 * _min_branch_distance(data.cover, x0)
    out = []
    for c in range(count):
        total = np.zeros(g, dtype=complex)
        for j in range(g - 1):
            total = total + integrate(data, x0, y0, x0 + r * np.exp(1j * (1.3 + 2.1 * c + 0.7 * j)))[0]
        out.append(total)
    return out


def riemann_constants(data: PeriodData, x0, y0, images=None):
    """``(K^x, Z, Z')`` with ``A^x((df)) + 2K^x = Omega Z + Z'``.

    ``K^x`` is fixed modulo the lattice by the relation with the canonical
    divisor up to a half period, and the half period by the vanishing
    ``theta(K^x + A^x(D)) = 0`` for effective ``D`` of degree ``g - 1``.
    """
    g = data.genus
    om = data.omega
    images = divisor_images(data, x0, y0) if images is None else images
    S = sum(p.order * v for p, v in zip(hyperelliptic_divisor(data.cover), images))
    probes = _probe_divisors(data, x0, y0)
    scores = []
    for m in itertools.product((0, 1), repeat=g):
        for n in itertools.product((0, 1), repeat=g):
            K = (-S + om @ np.array(m) + np.array(n)) / 2
            scores.append((max(abs(theta(K + d, om)) for d in probes), K, m, n))
    scores.sort(key=lambda t: t[0])
    best, runner = scores[0], scores[1]
    if best[0] > 1e-8 or runner[0] < 1e3 * best[0]:
        raise NumericalError("integer residual too large: Riemann constants not isolated")
    return best[1], np.array(best[2]), np.array(best[3])


def shift_vectors(data: PeriodData, x0, y0, K=None, max_residual: float = 1e-6):
    """Integers ``Z, Z'`` with ``A^x((df)) + 2K = Omega Z + Z'`` and the residual."""
    if K is None:
        K = riemann_constants(data, x0, y0)[0]
    total = 2 * K
    for p in hyperelliptic_divisor(data.cover):
        total = total + p.order * abel_to_divisor_point(data, x0, y0, p)
    om = data.omega
    Z = np.linalg.solve(om.imag, total.imag)
    Zr = np.rint(Z)
    Zp = total.real - om.real @ Zr
    Zpr = np.rint(Zp)
    residual = float(np.max(np.abs(total - om @ Zr - Zpr)))
    if residual > max_residual:
        raise NumericalError(f"integer residual too large ({residual:.2e})")
    return Zr.astype(int), Zpr.astype(int), residual


# -- prime form -------------------------------------------------------------------
#
# E(x, y) does not depend on the odd characteristic, but a given omega_delta
# vanishes somewhere (on hyperelliptic curves at branch points), where the
# quotient formula degenerates to 0/0.  Each evaluation therefore uses the
# nonsingular odd characteristic whose omega_delta is largest at the points
# involved.

def delta_coefficients(data: PeriodData, delta: ThetaCharacteristic) -> np.ndarray:
    """Coefficients ``p`` with ``omega_delta = sum p_i x^i dx / y``."""
    grad = theta_gradient(np.zeros(data.genus), data.omega, delta)
    return grad @ data.normalizer


def odd_characteristics(data: PeriodData, threshold: float = 1e-6):
    """Nonsingular odd characteristics with their ``omega_delta`` coefficients."""
    cache = data.extra.setdefault("odd", None)
    if cache is None:
        cache = []
        for ch in enumerate_characteristics(data.genus):
            if ch.is_odd:
                p = delta_coefficients(data, ch)
                if np.linalg.norm(p) > threshold:
                    cache.append((ch, p / np.linalg.norm(p), p))
        if not cache:
            raise NumericalError("no nonsingular odd characteristic found")
        data.extra["odd"] = cache
    return cache


def local_delta(data: PeriodData, p, point) -> complex:
    """``omega_delta / d zeta`` at a point: ``("x", x, y)`` or a :class:`DivisorPoint`."""
    cover = data.cover
    if isinstance(point, tuple):
        return np.polynomial.polynomial.polyval(point[1], p) / point[2]
    if point.kind == "branch":
        k = point.index
        h0 = np.sqrt(np.prod(cover.z[k] - np.delete(cover.z, k)))
        # omega_delta = 2 P_delta / h dzeta in zeta = sqrt(x - z_k)
        return 2 * np.polynomial.polynomial.polyval(cover.z[k], p) / h0
    return -point.index * p[cover.genus - 1]


def best_delta(data: PeriodData, points):
    best = None
    for ch, unit, p in odd_characteristics(data):
        score = min(abs(local_delta(data, unit, q)) for q in points)
        if best is None or score > best[0]:
            best = (score, ch, p)
    if best[0] < 1e-10:
        raise NumericalError("branch ambiguity unresolved: every omega_delta vanishes")
    return best[1], best[2]


def prime_form(data: PeriodData, x1, y1, x2, y2=None, delta=None):
    """``E(P, Q)`` as a scalar in the coordinate ``x`` at both points.

    ``Q`` is reached from ``P`` along a straight path; the square root of
    ``omega_delta`` is continued along the same path so that
    ``E ~ (x_Q - x_P)`` near the diagonal.
    """
    if x1 == x2 and (y2 is None or y2 == y1):
        return 0j
    v, y2c = integrate(data, x1, y1, x2)
    if y2 is not None and abs(y2c - y2) > 1e-8 * max(1.0, abs(y2)):
        raise NumericalError("branch ambiguity unresolved: endpoint is on the other sheet")
    xs, ys = _track(data.cover, x1, y1, x2)
    if delta is None:
        delta, p = best_delta(data, [("x", x1, y1), ("x", x2, y2c)])
    else:
        p = delta_coefficients(data, delta)
    w = np.polynomial.polynomial.polyval(xs, p) / ys
    if np.min(np.abs(w)) < 1e-8 * np.max(np.abs(w)):
        raise NumericalError("branch ambiguity unresolved: omega_delta vanishes on the path")
    sq = np.empty_like(w)
    sq[0] = np.sqrt(w[0])
    for k in range(1, len(w)):
        r = np.sqrt(w[k])
        sq[k] = r if abs(r - sq[k - 1]) <= abs(r + sq[k - 1]) else -r
    return theta(v, data.omega, delta) / (sq[0] * sq[-1])


def prime_form_at(data: PeriodData, x1, y1, point: DivisorPoint, v=None):
    """``E(zeta, p_k)``: the prime form with its second slot at a divisor point,
    written in the natural parameter there (coordinate ``x`` at the first slot).
    Defined up to sign."""
    v = abel_to_divisor_point(data, x1, y1, point) if v is None else v
    delta, p = best_delta(data, [("x", x1, y1), point])
    return theta(v, data.omega, delta) / np.sqrt(local_delta(data, p, ("x", x1, y1))
                                                 * local_delta(data, p, point))


def prime_form_pair(data: PeriodData, pk: DivisorPoint, pl: DivisorPoint, vk, vl):
    """``E(p_k, p_l)`` in natural parameters, from Abel images with a common basepoint.
    Defined up to sign."""
    delta, p = best_delta(data, [pk, pl])
    return theta(vl - vk, data.omega, delta) / np.sqrt(local_delta(data, p, pk)
                                                       * local_delta(data, p, pl))


# -- Wronskian and Fay's C ----------------------------------------------------------

def derivatives(data: PeriodData, x, y, order: int, n: int = 32) -> np.ndarray:
    """``d^j omega_i / dx^j`` for ``j < order`` by Cauchy integrals on a circle."""
    r = 0.25 * _min_branch_distance(data.cover, x)
    phi = 2 * np.pi * np.arange(n) / n
    xq = x + r * np.exp(1j * phi)
    yq = data.cover.continue_y(x, y, xq)
    vals = data.holomorphic(xq, yq)        # (g, n)
    out = np.empty((vals.shape[0], order), dtype=complex)
    for j in range(order):
        out[:, j] = factorial(j) * np.mean(vals * np.exp(-1j * j * phi), axis=1) / r ** j
    return out


def wronskian(data: PeriodData, x, y) -> complex:
    g = data.genus
    return complex(np.linalg.det(derivatives(data, x, y, g)))


def fay_C(data: PeriodData, x, y, K=None):
    """``(W(x), C(x))`` with ``C = (sum omega_i d/dv_i)^g theta |_{v=K^x} / W``."""
    g = data.genus
    K = riemann_constants(data, x, y)[0] if K is None else K
    om = data.holomorphic(x, y)
    W = wronskian(data, x, y)
    if abs(W) < 1e-14:
        raise NumericalError("Wronskian vanishes at sample point")
    num = theta_deriv(K, data.omega, None, [om] * g)
    return W, num / W
