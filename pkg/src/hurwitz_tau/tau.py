"""Assembly of the tau function and its normalized companion ``eta``.

``log tau`` is carried as a modulus and a phase.  The phase is only
meaningful up to the roots of unity allowed by the square roots inside the
prime forms; the checks below compare moduli unless stated otherwise.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import InconsistentDataError, NumericalError
from . import abel, rational
from .hyperelliptic import HyperellipticCover, PeriodData, periods
from .report import CheckReport, compare
from .theta import theta_deriv

# Base points for the free point zeta; the first one clear of the branch
# points is used.
ZETA_CANDIDATES = (0.37 + 1.91j, -1.13 - 0.77j, 2.71 + 0.29j, -0.21 - 2.43j)


@dataclass
class LogTau:
    log_modulus: float
    phase: float
    tol: float
    branch_log: list = field(default_factory=list)

    @property
    def value(self) -> complex:
        return cmath.exp(complex(self.log_modulus, self.phase))

    def to_dict(self) -> dict:
        return {"log_modulus": self.log_modulus, "phase": self.phase,
                "tol": self.tol, "branch_log": list(self.branch_log)}


def _wrap(phase: float) -> float:
    return math.remainder(phase, 2 * math.pi)


def _clog(z: complex) -> complex:
    if z == 0:
        raise NumericalError("vanishing factor in tau")
    return cmath.log(z)


def admissible_points(locations, count: int = 1) -> list:
    """Evaluation points for ``zeta`` well away from the given finite locations."""
    locs = [complex(x) for x in locations]
    scale = max([1.0] + [abs(x) for x in locs])
    out = [c * scale for c in ZETA_CANDIDATES
           if min([abs(c * scale - x) for x in locs] + [scale]) > 0.2 * scale]
    if len(out) < count:
        raise NumericalError("no admissible base point for zeta")
    return out[:count]


def hyperelliptic_log_tau(data: PeriodData, zeta=None) -> LogTau:
    """``log tau`` from theta functions, prime forms and Fay's ``C`` at the point ``zeta``.

    The shift vectors enter through ``exp(4 pi i <Omega Z - 4K, Z>)``.  This
    is the form that leaves the product invariant when a divisor image or
    ``K`` moves by a lattice vector; see the module tests.
    """
    cover = data.cover
    g = cover.genus
    x = admissible_points(cover.z)[0] if zeta is None else zeta
    y = cover.y(x)
    pts = abel.hyperelliptic_divisor(cover)
    images = abel.divisor_images(data, x, y)
    K, Z, Zp = abel.riemann_constants(data, x, y, images)
    om = data.omega
    log = []

    W = abel.wronskian(data, x, y)
    num = theta_deriv(K, om, None, [data.holomorphic(x, y)] * g)
    total = 16 * (_clog(num) - _clog(W))
    total -= 4j * math.pi * ((om @ Z - 4 * K) @ Z)
    log.append(f"zeta={x:.6g}, Z={Z.tolist()}, Z'={Zp.tolist()}")

    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            E = abel.prime_form_pair(data, pts[a], pts[b], images[a], images[b])
            total += 4 * pts[a].order * pts[b].order * _clog(E)
    if g > 1:
        for p, v in zip(pts, images):
            total -= 8 * (g - 1) * p.order * _clog(abel.prime_form_at(data, x, y, p, v))
    return LogTau(total.real, _wrap(total.imag), data.tol, log)


def hyperelliptic_closed_form(data: PeriodData) -> LogTau:
    """``log tau`` for ``y^2 = prod (x - z_k)``: ``det(A)^24 prod_{i<j} (z_i - z_j)^6``,
    ``A`` the a-period matrix of ``x^i dx / y``.  Agrees with the theta
    expression up to a constant depending only on ``g``."""
    z = data.cover.z
    total = 24 * _clog(np.linalg.det(data.A))
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            total += 6 * _clog(z[i] - z[j])
    return LogTau(total.real, _wrap(total.imag), data.tol, ["closed form"])


def rational_log_tau(cover, w=None) -> LogTau:
    """Genus-zero tau: ``prod_{k<l} E(p_k,p_l)^{4 d_k d_l} prod_k E(zeta,p_k)^{8 d_k}``.

    The theta, Wronskian and shift-vector factors are absent in genus zero.
    """
    pts = cover.divisor
    if w is None:
        w = admissible_points([p.location for p in pts if p.location is not None])[0]
    total = 0j
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            total += 4 * pts[a].order * pts[b].order * rational.log_prime_form_pair(pts[a], pts[b])
    for p in pts:
        total += 8 * p.order * rational.log_prime_form_at(cover, w, p)
    log = [f"zeta at w={w:.6g}"] + [f"{p.kind}@{p.location}: {p.extra['branch']}" for p in pts]
    return LogTau(total.real, _wrap(total.imag), 1e-14, log)


# -- dispatch -----------------------------------------------------------------------

def is_rational(cover) -> bool:
    return isinstance(cover, rational.RationalCover)


def branch_values(cover) -> np.ndarray:
    return cover.branch_points if is_rational(cover) else cover.z


def assemble_tau(cover, data: PeriodData | None = None, zeta=None, *, check: bool = False,
                 tol: float = 1e-8) -> LogTau:
    """``log tau`` of a cover; with ``check`` the value is recomputed at a second
    evaluation point and compared (the result must not depend on it)."""
    if is_rational(cover):
        locs = [p.location for p in cover.divisor if p.location is not None]
        compute = lambda z: rational_log_tau(cover, z)
    else:
        data = data or periods(cover)
        locs = cover.z
        compute = lambda z: hyperelliptic_log_tau(data, z)
    points = admissible_points(locs, 2 if check else 1)
    out = compute(points[0] if zeta is None else zeta)
    second = (lambda: compute(points[1])) if check else None
    if second is not None:
        other = second()
        err = abs(other.log_modulus - out.log_modulus)
        out.branch_log.append(f"x-independence: second point differs by {err:.3e}")
        if err > tol * max(1.0, abs(out.log_modulus)):
            raise NumericalError("x-independence violated")
    return out


def residue_rhs(cover, data: PeriodData | None, i: int) -> complex:
    """``-4 Res_{x_i} (S_B - S_f)/df`` at the ``i``-th finite simple branch point."""
    if is_rational(cover):
        crit = [p for p in cover.divisor if p.kind == "critical"]
        return -4 * rational.residue_checked(cover, crit[i])
    from .hyperelliptic import branch_residue_checked
    return -4 * branch_residue_checked(data or periods(cover), i)


def eta_value(cover, log_tau: LogTau) -> LogTau:
    """``log eta = (n-1) log tau - 6 log V``, ``V`` the Vandermonde of the branch points."""
    z = branch_values(cover)
    n = len(z)
    logV = 0j
    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) < 1e-12 * max(1.0, abs(z[i])):
                raise InconsistentDataError("coincident branch points")
            logV += cmath.log(z[i] - z[j])
    val = (n - 1) * complex(log_tau.log_modulus, log_tau.phase) - 6 * logV
    return LogTau(val.real, _wrap(val.imag), log_tau.tol, log_tau.branch_log + ["eta"])


# -- checks ---------------------------------------------------------------------

def _log_modulus(cover, **kw) -> float:
    return assemble_tau(cover, **kw).log_modulus


def _wirtinger(func, h: float) -> complex:
    """``d/dz`` of a holomorphic ``F`` from ``func(dz) = log|F(z + dz)|``:
    ``F'/F = d_x log|F| - i d_y log|F|``."""
    dx = (func(h) - func(-h)) / (2 * h)
    dy = (func(1j * h) - func(-1j * h)) / (2 * h)
    return complex(dx, -dy)


def _richardson(func, h: float) -> tuple[complex, complex]:
    coarse, fine = _wirtinger(func, h), _wirtinger(func, h / 2)
    return fine, (4 * fine - coarse) / 3


def check_pde(cover, i: int, step: float = 1e-5, *, data: PeriodData | None = None,
              threshold: float = 1e-5, abs_floor: float = 1e-8) -> CheckReport:
    """Central difference of ``log tau`` in ``z_i`` against ``residue_rhs``
    (hyperelliptic covers; for rational covers see :func:`check_pde_path`)."""
    if is_rational(cover):
        raise InconsistentDataError("rational covers are checked along coefficient paths")
    data = data or periods(cover)
    scale = float(np.min(np.abs(np.delete(cover.z, i) - cover.z[i])))
    h = step * scale
    raw, refined = _richardson(lambda dz: _log_modulus(cover.moved(i, dz)), h)
    rhs = residue_rhs(cover, data, i)
    floor = abs_floor if abs(rhs) < 1e-6 else None
    rep = compare("pde", refined, rhs, threshold, abs_floor=floor,
                  params={"branch_index": i, "step": h, "raw_fd": raw,
                          "raw_rel_err": abs(raw - rhs) / max(abs(rhs), 1e-300)})
    return rep


def _track_branch_values(base: np.ndarray, new: np.ndarray) -> np.ndarray:
    out = np.empty_like(base)
    used = set()
    for k, z in enumerate(base):
        j = min((j for j in range(len(new)) if j not in used), key=lambda j: abs(new[j] - z))
        used.add(j)
        out[k] = new[j]
    return out


def coefficient_path(cover, index: int, direction: complex = 1.0):
    """``t -> cover`` with the numerator coefficient ``index`` moved by ``t * direction``."""
    def at(t):
        num = list(cover.numerator) + [0] * max(0, index + 1 - len(cover.numerator))
        num[index] = num[index] + t * direction
        return rational.RationalCover(tuple(num), cover.denominator)
    return at


def check_pde_path(path, step: float = 1e-5, *, threshold: float = 1e-7,
                   abs_floor: float = 1e-10) -> CheckReport:
    """``d log tau / dt`` along a coefficient path against ``sum_i residue_rhs(i) dz_i/dt``."""
    base = path(0.0)
    z0 = base.branch_points
    raw, refined = _richardson(lambda dt: _log_modulus(path(dt)), step)
    dz = (_track_branch_values(z0, path(step).branch_points)
          - _track_branch_values(z0, path(-step).branch_points)) / (2 * step)
    rhs = sum(residue_rhs(base, None, i) * dz[i] for i in range(len(z0)))
    floor = abs_floor if abs(rhs) < 1e-6 else None
    return compare("pde_path", refined, complex(rhs), threshold, abs_floor=floor,
                   params={"step": step, "raw_fd": raw})


def homogeneity_exponent(cover) -> Fraction:
    """``3 n(mu) - 2d + 2 sum 1/m_i`` for the profile ``mu`` over infinity."""
    mu = infinity_profile(cover)
    n = len(branch_values(cover))
    d = 2 if not is_rational(cover) else cover.degree
    return 3 * n - 2 * d + 2 * sum(Fraction(1, m) for m in mu)


def euler_value(cover) -> Fraction:
    """``-3 n(mu)/4 + d/2 - 1/2 sum 1/m_i``."""
    mu = infinity_profile(cover)
    n = len(branch_values(cover))
    d = 2 if not is_rational(cover) else cover.degree
    return Fraction(-3 * n, 4) + Fraction(d, 2) - Fraction(1, 2) * sum(Fraction(1, m) for m in mu)


def infinity_profile(cover) -> tuple:
    return cover.infinity_profile if is_rational(cover) else (1, 1)


def scaled_cover(cover, eps):
    return cover.scaled(eps)


def check_scaling(cover, eps_list=(2.0, 1 / 3, cmath.exp(1j * math.pi / 5)), *,
                  threshold: float = 1e-8) -> list[CheckReport]:
    """``log|tau(eps f)| - log|tau(f)|`` against ``exponent * log|eps|``.  The phase
    is compared modulo ``2 pi / 48``."""
    p = homogeneity_exponent(cover)
    base = assemble_tau(cover)
    reports = []
    for eps in eps_list:
        eps = complex(eps)
        other = assemble_tau(scaled_cover(cover, eps))
        lhs = other.log_modulus - base.log_modulus
        rhs = float(p) * math.log(abs(eps))
        dphase = other.phase - base.phase - float(p) * cmath.phase(eps)
        unit = 2 * math.pi / 48
        phase_err = abs(math.remainder(dphase, unit))
        rep = compare("scaling", lhs, rhs, threshold, abs_floor=threshold,
                      params={"eps": eps, "exponent": p, "phase_err_mod_2pi_48": phase_err})
        rep.passed = rep.passed and phase_err < 1e-6
        reports.append(rep)
    return reports


def check_euler(cover, data: PeriodData | None = None, *, threshold: float = 1e-8) -> CheckReport:
    """``sum_i z_i Res_{x_i} (S_B - S_f)/df`` against the Euler value."""
    z = branch_values(cover)
    if not is_rational(cover):
        data = data or periods(cover)
    lhs = sum(z[i] * residue_rhs(cover, data, i) / -4 for i in range(len(z)))
    target = euler_value(cover)
    return compare("euler", complex(lhs), float(target), threshold, abs_floor=threshold,
                   params={"target": target})


def moebius_points(z, gamma) -> np.ndarray:
    a, b, c, d = gamma
    den = c * np.asarray(z) + d
    if np.any(np.abs(den) < 1e-12):
        raise InconsistentDataError("gamma sends a branch point to infinity")
    return (a * np.asarray(z) + b) / den


def check_psl2(cover, gamma, *, threshold: float = 1e-6) -> CheckReport:
    """``log|eta|`` before and after ``f -> gamma o f``.

    The hyperelliptic image is rebuilt from the moved branch points with the
    same chain convention.  If the rebuilt marking differs (the period
    matrices disagree), the marking-independent combination
    ``log|eta| + 12 (n-1) log det Im Omega`` is compared instead.
    """
    a, b, c, d = gamma
    if is_rational(cover):
        if any(p.kind == "pole" and p.extra["m"] > 1 for p in cover.divisor):
            raise InconsistentDataError("gamma moves the degenerate value away from infinity")
        moebius_points(cover.branch_points, gamma)
        new = cover.moebius(a, b, c, d)
        e0 = eta_value(cover, assemble_tau(cover)).log_modulus
        e1 = eta_value(new, assemble_tau(new)).log_modulus
        return compare("psl2", e1, e0, threshold, abs_floor=threshold, params={"gamma": list(gamma)})
    z1 = moebius_points(cover.z, gamma)
    new = HyperellipticCover(tuple(z1))
    d0, d1 = periods(cover), periods(new)
    e0 = eta_value(cover, hyperelliptic_log_tau(d0)).log_modulus
    e1 = eta_value(new, hyperelliptic_log_tau(d1)).log_modulus
    same = np.max(np.abs(d0.omega - d1.omega)) < 1e-8
    mode = "raw"
    if not same:
        n = cover.n
        e0 += 12 * (n - 1) * math.log(np.linalg.det(d0.omega.imag))
        e1 += 12 * (n - 1) * math.log(np.linalg.det(d1.omega.imag))
        mode = "marking-invariant"
    return compare("psl2", e1, e0, threshold, abs_floor=threshold,
                   params={"gamma": list(gamma), "mode": mode})


def check_modular(cover, sigma, *, threshold: float = 1e-6, data: PeriodData | None = None) -> CheckReport:
    """``log|tau'/tau|`` for the basis ``sigma (a, b)`` against ``24 log|det(C Omega + D)|``."""
    if is_rational(cover):
        raise InconsistentDataError("basis change not implementable for this family")
    from .hyperelliptic import remark
    data = data or periods(cover)
    g = data.genus
    sigma = np.asarray(sigma, dtype=int)
    new = remark(data, sigma)
    lhs = hyperelliptic_log_tau(new).log_modulus - hyperelliptic_log_tau(data).log_modulus
    D, C = sigma[:g, :g], sigma[:g, g:]
    rhs = 24 * math.log(abs(np.linalg.det(C @ data.omega + D)))
    return compare("modular", lhs, rhs, threshold, abs_floor=threshold,
                   params={"sigma": sigma.tolist()})


# -- boundary asymptotics -------------------------------------------------------------

DEFAULT_EPS_GRID = tuple(np.logspace(-2, -4, 9))


@dataclass
class DegenerationFamily:
    """Branch points ``eps z_i`` (``i`` in ``scaled``) and ``z_i`` (the rest), ``d = 2``."""

    base: HyperellipticCover
    scaled: tuple
    epsilon_grid: tuple = DEFAULT_EPS_GRID

    def __post_init__(self):
        n = self.base.n
        self.scaled = tuple(sorted(set(self.scaled)))
        if not self.scaled or any(not 0 <= i < n for i in self.scaled) or len(self.scaled) >= n - 1:
            raise InconsistentDataError("scaled indices must be a proper subset of size 2..n-2")
        if len(self.scaled) < 2:
            raise InconsistentDataError("at least two branch points must collide")
        if any(abs(self.base.z[i]) < 1e-12 for i in range(n) if i not in self.scaled):
            raise InconsistentDataError("fixed branch points must avoid 0")
        grid = list(self.epsilon_grid)
        if any(b >= a for a, b in zip(grid, grid[1:])) or grid[-1] <= 0:
            raise InconsistentDataError("epsilon grid must be positive and strictly decreasing")

    @property
    def k(self) -> int:
        return len(self.scaled)

    @property
    def stratum(self):
        from .combinatorics import BoundaryStratum, RamificationProfile
        return BoundaryStratum(self.k, RamificationProfile((1, 1) if self.k % 2 == 0 else (2,)))

    def cover(self, eps: float) -> HyperellipticCover:
        z = [eps * x if i in self.scaled else x for i, x in enumerate(self.base.z)]
        return HyperellipticCover(tuple(z))

    def predicted(self, target: str) -> Fraction:
        n, k, d = self.base.n, self.k, 2
        mu = self.stratum.profile.parts
        s = sum(Fraction(1, m) for m in mu)
        if target == "tau":
            return 3 * k - 2 * d + 2 * s
        if target == "eta":
            return 3 * k * (n - k) - 2 * (n - 1) * (d - s)
        raise InconsistentDataError(f"unknown target {target!r}")


def boundary_rows(family: DegenerationFamily) -> list[dict]:
    rows = []
    for eps in family.epsilon_grid:
        cov = family.cover(eps)
        lt = assemble_tau(cov)
        le = eta_value(cov, lt)
        rows.append({"epsilon": eps, "log_eps": math.log(eps),
                     "log_tau": lt.log_modulus, "log_eta": le.log_modulus})
    return rows


def fit_boundary_exponent(family: DegenerationFamily, target: str = "tau", *,
                          threshold: float = 0.01, rows=None) -> CheckReport:
    """Least-squares slope of ``log|tau|`` (or ``log|eta|``) against ``log eps``."""
    rows = rows or boundary_rows(family)
    x = np.array([r["log_eps"] for r in rows])
    y = np.array([r["log_" + target] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    local = np.diff(y) / np.diff(x)
    want = float(family.predicted(target))
    drift = float(local[-1] - local[0])
    monotone = bool(np.all(np.diff(local) > 0) or np.all(np.diff(local) < 0))
    if monotone and abs(drift) > 0.1 * max(1.0, abs(want)):
        raise NumericalError("grid outside asymptotic regime")
    return compare(f"boundary_{target}", slope, want, threshold,
                   params={"k": family.k, "mu": list(family.stratum.profile.parts),
                           "epsilon_grid": list(family.epsilon_grid),
                           "local_slopes": local.tolist(), "drift": drift})


def rows_to_csv(rows) -> str:
    lines = ["epsilon,log_eps,log_tau,log_eta"]
    for r in rows:
        lines.append(",".join(format(r[k], ".17g") for k in ("epsilon", "log_eps", "log_tau", "log_eta")))
    return "\n".join(lines) + "\n"
