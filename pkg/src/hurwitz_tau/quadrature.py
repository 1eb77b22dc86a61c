"""Quadrature kernels: endpoint-singular segment integrals and contour means."""
from __future__ import annotations

import numpy as np

from . import NumericalError

_GL_CACHE: dict[int, tuple] = {}


def gauss_legendre(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def adaptive_gl(func, lo: float, hi: float, tol: float, order: int = 20,
                max_intervals: int = 4000) -> np.ndarray:
    """Adaptive composite Gauss-Legendre for a vector-valued integrand.

    ``func`` maps a 1-D array of nodes to an array of shape ``(m, nodes)``.
    Each panel compares ``order`` and ``2*order`` point rules and is bisected
    until the difference, scaled by the panel's share of the interval, is
    below ``tol`` or at the rounding level of the panel.
    """
    x1, w1 = gauss_legendre(order)
    x2, w2 = gauss_legendre(2 * order)
    total = None
    stack = [(lo, hi)]
    width = hi - lo
    count = 0
    while stack:
        a, b = stack.pop()
        count += 1
        if count > max_intervals:
            raise NumericalError("quadrature did not converge")
        mid, half = (a + b) / 2, (b - a) / 2
        nodes = np.concatenate([mid + half * x1, mid + half * x2])
        vals = np.atleast_2d(func(nodes))
        i1 = half * vals[:, : order] @ w1
        i2 = half * vals[:, order:] @ w2
        err = np.max(np.abs(i2 - i1))
        # below this the two rules differ only by rounding
        noise = 64 * np.finfo(float).eps * half * np.max(np.abs(vals[:, order:]) @ w2)
        if (err <= tol * max(1.0, np.max(np.abs(i2))) * (b - a) / width or err <= noise
                or (b - a) < 1e-14 * width):
            total = i2 if total is None else total + i2
        else:
            stack.extend([(mid, b), (a, mid)])
    return total


def segment_sqrt_integral(func, a: complex, b: complex, tol: float) -> np.ndarray:
    """``int_a^b func(x, s) dx`` for integrands with inverse square-root
    singularities at both ends.

    With ``x = (a+b)/2 - (b-a)/2 cos(t)`` the Jacobian ``(b-a)/2 sin t`` cancels
    the singularities.  ``func(x, t)`` receives the nodes and the angle, and
    should return ``sin(t) * integrand`` already multiplied in, i.e. the
    kernel is responsible for the smooth quotient; see the callers.
    """
    h = (b - a) / 2

    def kernel(t):
        # measured from the nearer endpoint so that x - a keeps full relative precision
        x = np.where(t <= np.pi / 2, a + 2 * h * np.sin(t / 2) ** 2, b - 2 * h * np.cos(t / 2) ** 2)
        return h * func(x, t)

    return adaptive_gl(kernel, 0.0, np.pi, tol)


def circle_mean(func, center: complex, radius: float, n: int = 64) -> complex:
    """Trapezoidal mean of ``func`` over a circle; exact for Laurent terms
    ``(z-center)^k`` with ``0 < |k| < n``."""
    phi = 2 * np.pi * np.arange(n) / n
    return complex(np.mean(func(center + radius * np.exp(1j * phi))))
