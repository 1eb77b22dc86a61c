"""Exact rational coefficients of boundary strata in the Hodge class.

Coefficients are reported raw; the orbifold weights ``1/|Aut(f)|`` of
nodal admissible covers are not computed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import InconsistentDataError
from .combinatorics import (BoundaryStratum, RamificationProfile,
                            enumerate_strata, stratum_realizable)


@dataclass(frozen=True)
class HodgeCoefficient:
    g: int
    d: int
    stratum: BoundaryStratum
    value: Fraction
    realizable: bool | None = None

    def row(self) -> dict:
        s = self.stratum
        return {
            "g": self.g, "d": self.d, "k": s.k, "mu": list(s.profile.parts),
            "lcm": s.lcm, "branch_count": s.branch_count,
            "coefficient_num": self.value.numerator,
            "coefficient_den": self.value.denominator,
            "realizable": self.realizable, "aut_annotation": None,
        }


def _profile_defect(mu: RamificationProfile) -> Fraction:
    """``d - sum 1/m_i``; vanishes exactly for the unramified profile."""
    return mu.degree - sum(Fraction(1, m) for m in mu.parts)


def stratum_coefficient(g: int, d: int, k: int, mu) -> HodgeCoefficient:
    mu = mu if isinstance(mu, RamificationProfile) else RamificationProfile(tuple(mu))
    stratum = BoundaryStratum(k, mu)
    if mu.degree != d or not 2 <= k <= g + d - 1 or (k - (d - mu.r)) % 2:
        raise InconsistentDataError(f"invalid stratum (k={k}, mu={mu}) for g={g}, d={d}")
    n = 2 * g + 2 * d - 2
    value = math.prod(mu.parts) * (Fraction(k * (n - k), 8 * (n - 1))
                                   - Fraction(1, 12) * _profile_defect(mu))
    return HodgeCoefficient(g, d, stratum, value)


def hodge_table(g: int, d: int, *, realizability: bool = False,
                budget: int = 5_000_000) -> list[HodgeCoefficient]:
    rows = []
    for s in enumerate_strata(g, d):
        c = stratum_coefficient(g, d, s.k, s.profile)
        if realizability:
            c = HodgeCoefficient(g, d, s, c.value,
                                 stratum_realizable(g, d, s, budget=budget))
        rows.append(c)
    return rows


def hyperelliptic_closed_forms(g: int) -> dict:
    """Closed-form hyperelliptic coefficients keyed by ``(k, mu)``."""
    out = {}
    for i in range(1, (g + 1) // 2 + 1):
        out[(2 * i, (1, 1))] = Fraction(i * (g + 1 - i), 4 * g + 2)
    for j in range(1, g // 2 + 1):
        out[(2 * j + 1, (2,))] = Fraction(j * (g - j), 2 * g + 1)
    return out


def check_d2_closed_form(g: int):
    """Compare the general formula at ``d = 2`` with the closed forms."""
    from .report import CheckReport

    if g < 2:
        raise InconsistentDataError("closed-form comparison needs g >= 2")
    closed = hyperelliptic_closed_forms(g)
    table = {c.stratum.key(): c.value for c in hodge_table(g, 2)}
    mismatches = [key for key in set(closed) | set(table) if closed.get(key) != table.get(key)]
    return CheckReport(
        check="d2_closed_form",
        lhs=len(table), rhs=len(closed),
        abs_err=float(len(mismatches)), rel_err=float(len(mismatches)),
        passed=not mismatches,
        params={
            "g": g,
            "mismatches": [[k, list(mu)] for k, mu in sorted(mismatches)],
            "caveat": ("coefficient at delta^(2)_[1^2] is twice the classical one; "
                       "delta^(2)_[1^2] = 1/2 pi^{-1}(delta_0)"),
        },
    )


def genus0_k2_vector(d: int) -> dict:
    """k = 2 coefficients for ``mu = [3,1^{d-3}], [2,2,1^{d-4}], [1^d]`` at g = 0."""
    if d < 4:
        raise InconsistentDataError("genus-0 vector needs d >= 4")
    c3 = stratum_coefficient(0, d, 2, (3,) + (1,) * (d - 3)).value
    c22 = stratum_coefficient(0, d, 2, (2, 2) + (1,) * (d - 4)).value
    c1 = stratum_coefficient(0, d, 2, (1,) * d).value
    scale = 6 * (2 * d - 3)
    scaled = (c3 * scale, c22 * scale, c1 * scale)
    reference_vector = (d - 6, -3, 3 * (d - 2))
    return {
        "d": d,
        "coefficients": (c3, c22, c1),
        "scaled": scaled,
        "reference_vector": reference_vector,
        # pushforward multiplicity of each stratum onto its image divisor
        "multiplicity": {"C_d": 1, "M_d": "unresolved", "Delta_d": 1},
        "agrees_except_M_d": scaled[0] == reference_vector[0] and scaled[2] == reference_vector[2],
        "c3_vanishes": c3 == 0,
    }
