"""Hyperelliptic covers ``y^2 = prod_k (x - z_k)`` and their periods.

Homology convention: branch points are joined into the polygonal chain
``z_1 -> z_2 -> ... -> z_{2g+2}``.  The odd links ``[z_{2i-1}, z_{2i}]`` are
the square-root cuts and carry the cycles ``a_i``; the even links
``[z_{2j}, z_{2j+1}]`` lift to closed cycles ``c_j`` and
``b_i = c_i + ... + c_g``.  The chain must be simple.  Every period
collapses onto the links, where the integrand has inverse square-root
singularities at both ends.

Points on the curve are explicit pairs ``(x, y)``; nearby points are reached
by analytic continuation ``y' = y exp(1/2 sum log1p(dx / (x - z_k)))``,
which is exact inside the disc that avoids all branch points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import InconsistentDataError, NumericalError
from .quadrature import segment_sqrt_integral
from .theta import check_period_matrix

CHAIN_SAFETY = 1e-2


def _seg_point_distance(p, a, b):
    ab = b - a
    t = np.clip(((p - a) * np.conj(ab)).real / abs(ab) ** 2, 0.0, 1.0)
    return abs(p - (a + t * ab))


def _segments_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        return np.sign(((q - p) * np.conj(r - p)).imag)

    return (orient(a, b, c) != orient(a, b, d)) and (orient(c, d, a) != orient(c, d, b))


@dataclass(frozen=True)
class HyperellipticCover:
    branch_points: tuple

    def __post_init__(self):
        z = tuple(complex(v) for v in self.branch_points)
        object.__setattr__(self, "branch_points", z)
        if len(z) < 4 or len(z) % 2:
            raise InconsistentDataError("need an even number >= 4 of branch points (g >= 1)")
        arr = np.array(z)
        diff = np.abs(arr[:, None] - arr[None, :]) + np.eye(len(z))
        if np.min(diff) == 0:
            raise InconsistentDataError("branch points must be distinct")
        self._check_chain(arr)

    @staticmethod
    def _check_chain(z):
        links = [(z[k], z[k + 1]) for k in range(len(z) - 1)]
        for i, (a, b) in enumerate(links):
            for j in range(i + 2, len(links)):
                if _segments_cross(a, b, *links[j]):
                    raise InconsistentDataError("cut chain self-intersects")
            for k, p in enumerate(z):
                if k in (i, i + 1):
                    continue
                if _seg_point_distance(p, a, b) < CHAIN_SAFETY * min(abs(p - a), abs(p - b)):
                    raise InconsistentDataError("branch point too close to a cut-chain link")

    @property
    def z(self) -> np.ndarray:
        return np.array(self.branch_points)

    @property
    def genus(self) -> int:
        return len(self.branch_points) // 2 - 1

    @property
    def n(self) -> int:
        return len(self.branch_points)

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Coefficients ``c_k`` of ``x^k`` in ``prod (x - z_k)``."""
        return np.poly(self.z)[::-1].astype(complex)

    def scaled(self, eps: complex) -> "HyperellipticCover":
        return HyperellipticCover(tuple(eps * self.z))

    def moved(self, i: int, dz: complex) -> "HyperellipticCover":
        z = self.z.copy()
        z[i] += dz
        return HyperellipticCover(tuple(z))

    # -- square roots -------------------------------------------------------

    def _pair_root(self, i, x):
        """Branch of ``sqrt((x - z_{2i})(x - z_{2i+1}))`` cut along link ``2i``."""
        a, b = self.z[2 * i], self.z[2 * i + 1]
        m, h = (a + b) / 2, (b - a) / 2
        return (x - m) * np.sqrt(1 - (h / (x - m)) ** 2)

    def y(self, x):
        """Upper-sheet value of ``y`` off the cuts, ``y ~ x^{g+1}`` at infinity."""
        x = np.asarray(x, dtype=complex)
        out = np.ones_like(x)
        for i in range(self.genus + 1):
            out = out * self._pair_root(i, x)
        return out

    def continue_y(self, x0, y0, x):
        """Analytic continuation of ``(x0, y0)`` to ``x`` within the branch-point-free disc."""
        x = np.asarray(x, dtype=complex)
        dx = x - x0
        s = np.zeros_like(x)
        for zk in self.z:
            s = s + np.log1p(dx / (x0 - zk))
        return y0 * np.exp(0.5 * s)

    def branch_chart(self, i: int, zeta):
        """Points ``x = z_i + zeta^2`` with ``y`` analytic in ``zeta`` near ``z_i``."""
        zeta = np.asarray(zeta, dtype=complex)
        zi = self.z[i]
        others = np.delete(self.z, i)
        h0 = np.sqrt(np.prod(zi - others))
        s = np.zeros_like(zeta)
        for zk in others:
            s = s + np.log1p(zeta ** 2 / (zi - zk))
        return zi + zeta ** 2, zeta * h0 * np.exp(0.5 * s)

    # -- link integrals -----------------------------------------------------

    def cut_integral(self, i: int, funcs, tol: float) -> np.ndarray:
        """``int_{z_{2i}}^{z_{2i+1}} F(x) dx / y`` using the boundary value of ``y``
        from the left of the directed cut.  ``funcs(x)`` returns shape ``(m, len(x))``."""
        a, b = self.z[2 * i], self.z[2 * i + 1]
        h = (b - a) / 2

        def kern(x, t):
            rest = np.ones_like(x)
            for j in range(self.genus + 1):
                if j != i:
                    rest = rest * self._pair_root(j, x)
            # y_left = 1j * h * sin(t) * rest ; the sin(t) cancels the Jacobian
            return np.atleast_2d(funcs(x)) / (1j * h * rest)

        return segment_sqrt_integral(kern, a, b, tol)

    def gap_integral(self, j: int, funcs, tol: float) -> np.ndarray:
        """``int_{z_{2j+1}}^{z_{2j+2}} F(x) dx / y`` along the link between cuts ``j`` and ``j+1``."""
        a, b = self.z[2 * j + 1], self.z[2 * j + 2]
        h = (b - a) / 2
        others = np.delete(self.z, [2 * j + 1, 2 * j + 2])

        def kern(x, t):
            # y^2 / sin^2 t computed without cancellation at the endpoints
            q = -h * h * np.prod(x[None, :] - others[:, None], axis=0)
            root = np.sqrt(q)
            ref = self.y(x) / np.sin(t)
            root = np.where(np.abs(root - ref) <= np.abs(root + ref), root, -root)
            return np.atleast_2d(funcs(x)) / root

        return segment_sqrt_integral(kern, a, b, tol)

    def a_periods(self, funcs, tol):
        return np.stack([2 * self.cut_integral(i, funcs, tol) for i in range(self.genus)], axis=-1)

    def b_periods(self, funcs, tol):
        g = self.genus
        gaps = [2 * self.gap_integral(j, funcs, tol) for j in range(g)]
        return np.stack([sum(gaps[i:]) for i in range(g)], axis=-1)

    def kleinian(self, x, t):
        """Symmetric polynomial ``F(x,t)`` with ``F(x,x) = 2 f(x)``."""
        c = np.concatenate([self.coeffs, [0]])
        out = 0
        for k in range(self.genus + 2):
            out = out + (x * t) ** k * (2 * c[2 * k] + c[2 * k + 1] * (x + t))
        return out

    def monomials(self, x):
        return np.stack([x ** i for i in range(self.genus)])


@dataclass
class PeriodData:
    """Periods of ``u_i = x^{i-1} dx / y`` and derived normalization data."""

    cover: HyperellipticCover
    A: np.ndarray          # A[i, j] = a_j-period of u_i
    Bp: np.ndarray         # Bp[i, j] = b_j-period of u_i
    omega: np.ndarray
    bergman_N: np.ndarray  # holomorphic correction of the Kleinian kernel
    tol: float
    b_sign: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def genus(self):
        return self.cover.genus

    @cached_property
    def normalizer(self) -> np.ndarray:
        """``C`` with ``omega_k = sum_i C[k, i] u_i``."""
        return np.linalg.inv(self.A)

    def holomorphic(self, x, y) -> np.ndarray:
        """Normalized differentials ``omega_k`` at ``(x, y)`` in the coordinate ``x``."""
        x = np.asarray(x, dtype=complex)
        return np.tensordot(self.normalizer, self.cover.monomials(x), axes=1) / y


def periods(cover: HyperellipticCover, tol: float = 1e-13) -> PeriodData:
    A = cover.a_periods(cover.monomials, tol)
    Bp = cover.b_periods(cover.monomials, tol)
    if np.linalg.cond(A) > 1e12:
        raise NumericalError("ill-conditioned period matrix")
    omega = np.linalg.solve(A, Bp)
    sign = 1
    lam = np.linalg.eigvalsh(omega.imag + omega.imag.T)
    if lam[-1] < 0:
        sign, Bp, omega = -1, -Bp, -omega
    elif lam[0] < 0:
        raise NumericalError("inconsistent cut geometry: Im(Omega) is indefinite")
    omega = check_period_matrix(omega, floor=1e-6, sym_tol=1e-7)
    N = _bergman_correction(cover, A, tol)
    return PeriodData(cover, A, Bp, (omega + omega.T) / 2, N, tol, sign)


def _bergman_correction(cover, A, tol):
    g = cover.genus
    R = 2 * np.max(np.abs(cover.z)) + 1
    ts = R * np.exp(2j * np.pi * (np.arange(2 * g + 4) + 0.5) / (2 * g + 4))

    def funcs(x):
        return np.stack([cover.kleinian(x, t) / (x - t) ** 2 for t in ts])

    I = cover.a_periods(funcs, tol) / 4          # I[s, k]
    V = np.stack([(ts / R) ** j for j in range(g)], axis=1)
    coef, *_ = np.linalg.lstsq(V, I, rcond=None)
    resid = np.max(np.abs(V @ coef - I)) / max(1.0, np.max(np.abs(I)))
    if resid > 1e-8:
        raise NumericalError(f"Bergman normalization residual {resid:.2e}")
    m = (coef / (R ** np.arange(g))[:, None]).T   # m[k, j]
    N = np.linalg.solve(A.T, m)
    return (N + N.T) / 2


# -- Bergman kernel and projective connection ---------------------------------

def bergman(data: PeriodData, xp, yp, xq, yq):
    """``B(P, Q) / (dx_P dx_Q)``."""
    cov = data.cover
    b0 = (2 * yp * yq + cov.kleinian(xp, xq)) / (4 * (xp - xq) ** 2 * yp * yq)
    up = cov.monomials(np.asarray(xp, dtype=complex)) / yp
    uq = cov.monomials(np.asarray(xq, dtype=complex)) / yq
    return b0 - np.einsum("i...,ij,j...->...", up, data.bergman_N, uq)


def projective_connection(data: PeriodData, x, y, radius=None, n: int = 32):
    """``S_B`` in the coordinate ``x`` at the point ``(x, y)`` (vectorized over points).

    The constant Laurent coefficient of ``B - 1/(x-x')^2`` is the trapezoidal
    mean over a circle of radius ``radius`` (default: a quarter of the
    distance to the nearest branch point).
    """
    cov = data.cover
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    dist = np.min(np.abs(x[:, None] - cov.z[None, :]), axis=1)
    r = 0.25 * dist if radius is None else np.broadcast_to(radius, x.shape)
    phi = 2 * np.pi * np.arange(n) / n
    dx = r[:, None] * np.exp(1j * phi)[None, :]
    xq = x[:, None] + dx
    s = np.zeros_like(xq)
    for zk in cov.z:
        s = s + np.log1p(dx / (x[:, None] - zk))
    yq = y[:, None] * np.exp(0.5 * s)
    vals = bergman(data, x[:, None], y[:, None], xq, yq) - 1 / dx ** 2
    return 6 * vals.mean(axis=1)


def branch_residue(data: PeriodData, i: int, rho2=None, n_outer: int = 64, n_inner: int = 32) -> complex:
    """``Res_{x_i} (S_B - S_f) / df`` at the ramification point over ``z_i``.

    In ``zeta = sqrt(x - z_i)`` the 1-form is ``2 zeta S_B^{(x)} dzeta`` (``S_f``
    vanishes in the coordinate ``x = f``), so the residue is the circle mean
    of ``2 zeta^2 S_B^{(x)}``.
    """
    cov = data.cover
    zi = cov.z[i]
    dmin = np.min(np.abs(np.delete(cov.z, i) - zi))
    rho2 = 0.25 * dmin if rho2 is None else rho2
    zeta = np.sqrt(rho2) * np.exp(2j * np.pi * np.arange(n_outer) / n_outer)
    x, y = cov.branch_chart(i, zeta)
    sb = projective_connection(data, x, y, radius=0.25 * rho2, n=n_inner)
    return complex(np.mean(2 * zeta ** 2 * sb))


def branch_residue_checked(data: PeriodData, i: int, tol: float = 1e-9) -> complex:
    cov = data.cover
    dmin = np.min(np.abs(np.delete(cov.z, i) - cov.z[i]))
    r1 = branch_residue(data, i, 0.25 * dmin)
    r2 = branch_residue(data, i, 0.125 * dmin)
    if abs(r1 - r2) > 10 * tol * max(1.0, abs(r1)):
        raise NumericalError("expansion not converged")
    return r2


def bergman_a_period(data: PeriodData, xq, yq) -> np.ndarray:
    """a-periods in the first argument of ``B(., Q)``; zero by normalization."""
    cov = data.cover

    def funcs(x):
        return np.stack([cov.kleinian(x, xq) / (4 * (x - xq) ** 2 * yq)])

    a0 = cov.a_periods(funcs, data.tol)[0]
    uq = cov.monomials(np.asarray(xq, dtype=complex)) / yq
    return a0 - data.A.T @ data.bergman_N @ uq


def bergman_b_period(data: PeriodData, xq, yq) -> np.ndarray:
    cov = data.cover

    def funcs(x):
        return np.stack([cov.kleinian(x, xq) / (4 * (x - xq) ** 2 * yq)])

    b0 = data.b_sign * cov.b_periods(funcs, data.tol)[0]
    uq = cov.monomials(np.asarray(xq, dtype=complex)) / yq
    return b0 - data.Bp.T @ data.bergman_N @ uq


def remark(data: PeriodData, sigma) -> PeriodData:
    """Period data for the basis ``(a', b') = sigma (a, b)``, ``sigma = [[D, C], [B, A]]``.

    The new period matrix is ``(A Omega + B)(C Omega + D)^{-1}``.  The
    Bergman correction is shifted so that the a'-periods of ``B`` vanish.
    """
    g = data.genus
    sigma = np.asarray(sigma)
    if sigma.shape != (2 * g, 2 * g) or np.any(sigma != np.rint(sigma)):
        raise InconsistentDataError("basis change must be an integer 2g x 2g matrix")
    J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]])
    if np.max(np.abs(sigma.T @ J @ sigma - J)) > 0:
        raise InconsistentDataError("basis change is not symplectic")
    D, C = sigma[:g, :g], sigma[:g, g:]
    B, Amat = sigma[g:, :g], sigma[g:, g:]
    A1 = data.A @ D.T + data.Bp @ C.T
    B1 = data.A @ B.T + data.Bp @ Amat.T
    omega = np.linalg.solve(A1, B1)
    omega = check_period_matrix((omega + omega.T) / 2, floor=1e-6)
    M = np.linalg.solve((C @ data.omega + D), C)
    N = data.bergman_N + 2j * np.pi * data.normalizer.T @ M @ data.normalizer
    out = PeriodData(data.cover, A1, B1, omega, (N + N.T) / 2, data.tol, data.b_sign)
    out.extra["sigma"] = sigma.tolist()
    return out
