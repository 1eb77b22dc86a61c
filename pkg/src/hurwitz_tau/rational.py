"""Genus-zero covers ``f = P/Q`` of the Riemann sphere.

Everything is written in the global coordinate ``w`` (and ``t = 1/w`` at
``w = infinity``).  There the Bergman kernel is ``dw dw'/(w - w')^2``, so
``S_B = 0`` and the prime form is ``(w' - w)/sqrt(dw dw')``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from . import InconsistentDataError, NumericalError
from .abel import DivisorPoint

COLLISION_TOL = 1e-7


def _trim(coeffs) -> tuple:
    c = [complex(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if not c or (len(c) == 1 and c[0] == 0):
        raise InconsistentDataError("polynomial must be nonzero")
    return tuple(c)


def _cluster(roots, tol):
    """Group numerically repeated roots; returns (centre, multiplicity) pairs."""
    groups: list[list[complex]] = []
    for r in roots:
        for grp in groups:
            if abs(grp[0] - r) <= tol * max(1.0, abs(r)):
                grp.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


@dataclass(frozen=True)
class RationalCover:
    """``f(w) = P(w)/Q(w)``; coefficient lists in increasing degree."""

    numerator: tuple
    denominator: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "numerator", _trim(self.numerator))
        object.__setattr__(self, "denominator", _trim(self.denominator))
        if self.degree < 1:
            raise InconsistentDataError("f must be non-constant")
        scale = max(1.0, max(abs(c) for c in self.numerator))
        for r in self.Q.roots():
            if abs(self.P(r)) < 1e-10 * scale * max(1.0, abs(r)) ** (len(self.numerator) - 1):
                raise InconsistentDataError("numerator and denominator share a root (resultant vanishes)")

    @property
    def P(self) -> Polynomial:
        return Polynomial(self.numerator)

    @property
    def Q(self) -> Polynomial:
        return Polynomial(self.denominator)

    @property
    def degree(self) -> int:
        return max(len(self.numerator), len(self.denominator)) - 1

    @property
    def genus(self) -> int:
        return 0

    def __call__(self, w):
        return self.P(w) / self.Q(w)

    def scaled(self, eps) -> "RationalCover":
        return RationalCover(tuple(eps * c for c in self.numerator), self.denominator)

    def moebius(self, a, b, c, d) -> "RationalCover":
        """``(a f + b) / (c f + d)``."""
        P, Q = self.P, self.Q
        num, den = a * P + b * Q, c * P + d * Q
        return RationalCover(tuple(num.coef), tuple(den.coef))

    # -- derivatives ---------------------------------------------------------

    @cached_property
    def _N(self):
        P, Q = self.P, self.Q
        N1 = P.deriv() * Q - P * Q.deriv()
        N2 = N1.deriv() * Q - 2 * N1 * Q.deriv()
        N3 = N2.deriv() * Q - 3 * N2 * Q.deriv()
        return N1, N2, N3

    def df(self, w):
        """``f'(w) = N1 / Q^2``."""
        return self._N[0](w) / self.Q(w) ** 2

    def d2f(self, w):
        return self._N[1](w) / self.Q(w) ** 3

    def schwarzian(self, w):
        """``S_f = f'''/f' - 3/2 (f''/f')^2 = N3/(N1 Q^2) - 3/2 N2^2/(N1^2 Q^2)``."""
        N1, N2, N3 = self._N
        w = np.asarray(w, dtype=complex)
        n1, q = N1(w), self.Q(w)
        if np.any(np.abs(n1) < 1e-14 * max(1.0, np.max(np.abs(N1.coef)))):
            raise NumericalError("critical point without local expansion mode")
        return N3(w) / (n1 * q * q) - 1.5 * N2(w) ** 2 / (n1 * n1 * q * q)

    # -- divisor of df -------------------------------------------------------

    @cached_property
    def divisor(self) -> list[DivisorPoint]:
        return critical_divisor(self)[0]

    @property
    def branch_points(self) -> np.ndarray:
        """Finite critical values ``z_k``, in the order of the critical points."""
        return np.array([p.extra["value"] for p in self.divisor if p.kind == "critical"])

    @property
    def infinity_profile(self) -> tuple:
        return tuple(sorted((p.extra["m"] for p in self.divisor if p.kind == "pole"), reverse=True))


@dataclass(frozen=True)
class RationalDivisorPoint(DivisorPoint):
    extra: dict = field(default_factory=dict, compare=False)


def _polish(poly: Polynomial, r: complex, steps: int = 8) -> complex:
    d = poly.deriv()
    for _ in range(steps):
        dv = d(r)
        if dv == 0:
            break
        step = poly(r) / dv
        r = r - step
        if abs(step) < 1e-15 * max(1.0, abs(r)):
            break
    return complex(r)


def critical_divisor(cover: RationalCover):
    """Divisor of ``df`` and the critical (point, value) pairs.

    Each point carries ``extra["dzeta"]``: the derivative of its natural
    parameter with respect to ``w`` (``t = 1/w`` at infinity) at the point,
    with the principal root branch, recorded in ``extra["branch"]``.
    """
    P, Q = cover.P, cover.Q
    N1 = cover._N[0]
    pts: list[RationalDivisorPoint] = []
    crit = []
    roots = [_polish(N1, r) for r in N1.roots()] if N1.degree() > 0 else []
    for i, r in enumerate(roots):
        for s in roots[:i]:
            if abs(r - s) < COLLISION_TOL * max(1.0, abs(r)):
                raise NumericalError("degenerate critical point")
    for r in roots:
        if abs(Q(r)) < 1e-12:
            continue
        value = complex(cover(r))
        a = complex(cover.d2f(r)) / 2      # f - z = a (w - p)^2 + ...
        dz = cmath.sqrt(a)
        pts.append(RationalDivisorPoint("critical", len(pts), 1, r, "sqrt(f - f(p))",
                                        {"value": value, "dzeta": dz, "branch": "principal sqrt"}))
        crit.append((r, value))
    lead_q = Q.coef[-1]
    for p, m in _cluster(Q.roots(), 1e-6):
        p = _polish(Q, p) if m == 1 else p
        # f = c (w - p)^{-m} + ..., zeta = f^{-1/m}
        qm = Q.deriv(m)(p) / float(np.prod(np.arange(1, m + 1)))
        c = complex(P(p) / qm)
        dz = cmath.exp(-cmath.log(c) / m)
        pts.append(RationalDivisorPoint("pole", len(pts), -m - 1, p, f"f^(-1/{m})",
                                        {"m": m, "c": c, "dzeta": dz, "branch": f"principal (1/{m})-th root"}))
    degP, degQ = P.degree(), Q.degree()
    if degP > degQ:
        m = degP - degQ
        c = complex(P.coef[-1] / lead_q)
        dz = cmath.exp(-cmath.log(c) / m)
        pts.append(RationalDivisorPoint("pole", len(pts), -m - 1, None, f"f^(-1/{m}) in t=1/w",
                                        {"m": m, "c": c, "dzeta": dz, "branch": f"principal (1/{m})-th root"}))
    else:
        f_inf = P.coef[-1] / lead_q if degP == degQ else 0
        rest = P - f_inf * Q
        e = degQ - (rest.degree() if np.any(rest.coef) else -10 ** 6)
        if e > 1:
            raise NumericalError("critical point at infinity unsupported (apply a Moebius change of w)")
    total = sum(p.order for p in pts)
    if total != -2:
        raise NumericalError(f"divisor degree {total} != -2; critical points were lost")
    return pts, crit


# -- genus-zero prime form and Bergman kernel ---------------------------------------

def prime_form(w1, w2) -> complex:
    """Scalar ``E(w1, w2) = w2 - w1`` in the coordinate ``w``."""
    return complex(w2 - w1)


def log_prime_form_pair(p: DivisorPoint, q: DivisorPoint) -> complex:
    """``log E(p, q)`` in the natural parameters (defined modulo ``pi i``)."""
    lp, lq = 0.5 * cmath.log(p.extra["dzeta"]), 0.5 * cmath.log(q.extra["dzeta"])
    if p.location is None:
        p, q = q, p
    if q.location is None:
        # (w_q - w_p) / sqrt(dw_q / dt_q) -> -i as t_q -> 0
        return cmath.log(-1j) + lp + lq
    return cmath.log(q.location - p.location) + lp + lq


def log_prime_form_at(cover: RationalCover, w, p: DivisorPoint) -> complex:
    """``log E(zeta, p_k)`` with ``zeta = f`` at ``w`` (defined modulo ``pi i``)."""
    half = 0.5 * cmath.log(complex(cover.df(w))) + 0.5 * cmath.log(p.extra["dzeta"])
    if p.location is None:
        return cmath.log(-1j) + half
    return cmath.log(p.location - w) + half


def bergman(w1, w2) -> complex:
    return 1 / (w1 - w2) ** 2


def projective_connection(w) -> complex:
    return 0j


def residue(cover: RationalCover, p: DivisorPoint, radius=None, n: int = 64) -> complex:
    """``Res_p (S_B - S_f)/df = Res_p (-S_f / f')`` by a trapezoidal circle mean."""
    others = [q.location for q in cover.divisor if q is not p and q.location is not None]
    dist = min([abs(p.location - o) for o in others] + [1.0 + abs(p.location)])
    r = 0.25 * dist if radius is None else radius
    phi = 2 * np.pi * np.arange(n) / n
    u = r * np.exp(1j * phi)
    w = p.location + u
    vals = -cover.schwarzian(w) / cover.df(w)
    return complex(np.mean(vals * u))


def residue_checked(cover: RationalCover, p: DivisorPoint, tol: float = 1e-10) -> complex:
    r1 = residue(cover, p)
    others = [q.location for q in cover.divisor if q is not p and q.location is not None]
    dist = min([abs(p.location - o) for o in others] + [1.0 + abs(p.location)])
    r2 = residue(cover, p, radius=0.125 * dist)
    if abs(r1 - r2) > 10 * tol * max(1.0, abs(r1)):
        raise NumericalError("contour crosses singularity")
    return r2


def natural_parameter_schwarzian(kind: str, x, center=0j):
    """Schwarzian of the hyperelliptic natural parameters with respect to ``x``:
    ``sqrt(x - z)`` gives ``3/(8 (x - z)^2)``; ``1/x`` is Moebius and gives 0."""
    if kind == "branch":
        return 3 / (8 * (np.asarray(x) - center) ** 2)
    if kind == "infinity":
        return np.zeros_like(np.asarray(x, dtype=complex))
    raise InconsistentDataError(f"unknown natural parameter {kind}")
