"""Riemann theta functions with half-integer characteristics.

The lattice sum is truncated to a Euclidean ball around the point where the
Gaussian weight peaks; the radius comes from an explicit tail bound in the
smallest eigenvalue of ``Im Omega``.  Real and imaginary parts are summed
with :func:`math.fsum`, so results do not depend on summation order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import NumericalError

MIN_IMAG_EIGENVALUE = 1e-3
MAX_RADIUS = 80.0


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Characteristic ``[a, b]`` with ``a = alpha/2``, ``b = beta/2``, alpha, beta in {0,1}^g."""

    alpha: tuple
    beta: tuple

    @property
    def a(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=float) / 2

    @property
    def b(self) -> np.ndarray:
        return np.asarray(self.beta, dtype=float) / 2

    @property
    def genus(self) -> int:
        return len(self.alpha)

    @property
    def parity(self) -> int:
        return sum(x * y for x, y in zip(self.alpha, self.beta)) % 2

    @property
    def is_odd(self) -> bool:
        return self.parity == 1

    @classmethod
    def zero(cls, g: int) -> "ThetaCharacteristic":
        return cls((0,) * g, (0,) * g)


def enumerate_characteristics(g: int) -> list[ThetaCharacteristic]:
    if g < 1:
        raise ValueError("genus must be positive")
    bits = list(itertools.product((0, 1), repeat=g))
    return [ThetaCharacteristic(al, be) for al in bits for be in bits]


def check_period_matrix(omega, floor: float = MIN_IMAG_EIGENVALUE,
                        sym_tol: float = 1e-8) -> np.ndarray:
    omega = np.atleast_2d(np.asarray(omega, dtype=complex))
    if omega.shape[0] != omega.shape[1]:
        raise ValueError("period matrix must be square")
    if np.max(np.abs(omega - omega.T)) > sym_tol * max(1.0, np.max(np.abs(omega))):
        raise NumericalError("period matrix is not symmetric")
    lam = np.linalg.eigvalsh((omega.imag + omega.imag.T) / 2)
    if lam[0] < floor:
        raise NumericalError(f"Im(Omega) eigenvalue {lam[0]:.3g} below conditioning floor {floor}")
    return omega


def _tail_radius(g: int, lam: float, target: float, order: int, dnorm: float, shift: float) -> float:
    # Points with |u| in [s, s+1) number at most (2s+3)^g; each term is at most
    # exp(-pi lam s^2) * (2 pi (s + 1 + shift) dnorm)^order.
    def tail(R):
        total, s = 0.0, R
        while True:
            term = (2 * s + 3) ** g * math.exp(-math.pi * lam * s * s)
            if order:
                term *= (2 * math.pi * (s + 1 + shift) * dnorm) ** order
            total += term
            if term < 1e-3 * total and s > R + 2:
                return total
            s += 1

    R = 1
    while tail(R) > target:
        R += 1
        if R > MAX_RADIUS:
            raise NumericalError("radius overflow")
    return float(R)


def _lattice_sum(v, omega, char, tol, directions):
    omega = check_period_matrix(omega)
    g = omega.shape[0]
    v = np.asarray(v, dtype=complex).reshape(g)
    char = char or ThetaCharacteristic.zero(g)
    a, b = char.a, char.b
    Y = omega.imag
    lam = float(np.linalg.eigvalsh(Y)[0])
    c = np.linalg.solve(Y, v.imag)
    prefactor = math.pi * float(c @ Y @ c)
    dirs = [np.asarray(e, dtype=complex).reshape(g) for e in directions]
    dnorm = max([float(np.linalg.norm(e)) for e in dirs] + [1.0])
    target = tol * math.exp(-min(prefactor, 700.0))
    R = _tail_radius(g, lam, target, len(dirs), dnorm, float(np.linalg.norm(c)))
    center = -a - c
    ranges = [range(int(math.floor(x - R)), int(math.ceil(x + R)) + 1) for x in center]
    n = np.array(list(itertools.product(*ranges)), dtype=float)
    n = n[np.linalg.norm(n - center, axis=1) <= R]
    na = n + a
    phase = math.pi * 1j * np.einsum("ki,ij,kj->k", na, omega, na) + 2j * math.pi * na @ (v + b)
    terms = np.exp(phase)
    for e in dirs:
        terms = terms * (2j * math.pi * (na @ e))
    return complex(math.fsum(terms.real), math.fsum(terms.imag)), R


def theta(v, omega, char: ThetaCharacteristic | None = None, tol: float = 1e-12) -> complex:
    """``theta[char](v; Omega)`` with absolute truncation error below ``tol``."""
    return _lattice_sum(v, omega, char, tol, ())[0]


def theta_deriv(v, omega, char: ThetaCharacteristic | None, directions, tol: float = 1e-12) -> complex:
    """Iterated directional derivative ``(e_1 . d/dv) ... (e_k . d/dv) theta``."""
    omega = np.atleast_2d(omega)
    if len(directions) > omega.shape[0]:
        raise ValueError("at most g directional derivatives are supported")
    return _lattice_sum(v, omega, char, tol, directions)[0]


def theta_gradient(v, omega, char=None, tol: float = 1e-12) -> np.ndarray:
    omega = np.atleast_2d(omega)
    g = omega.shape[0]
    return np.array([theta_deriv(v, omega, char, [np.eye(g)[i]], tol) for i in range(g)])


def pick_nonsingular_odd(omega, tol: float = 1e-12, threshold: float = 1e-6) -> ThetaCharacteristic:
    """First odd characteristic (in enumeration order) with non-vanishing gradient at 0."""
    omega = np.atleast_2d(omega)
    g = omega.shape[0]
    for ch in enumerate_characteristics(g):
        if ch.is_odd and np.linalg.norm(theta_gradient(np.zeros(g), omega, ch, tol)) > threshold:
            return ch
    raise NumericalError("no nonsingular odd characteristic found")
