"""Combinatorial model of branched covers of the projective line.

Permutations are tuples of images of the symbols ``0..d-1``; the public
(cycle notation / JSON) form is 1-based.  Products compose left to right,
``compose(s, t)`` applies ``s`` first, so that the monodromy relation reads
``s_1 s_2 ... s_n = 1``.

Boundary strata ``(k, mu)`` of the space of admissible covers are
enumerated by the parity-filtered partition sum of the Hodge-class formula:
``2 <= k <= g + d - 1`` and ``k = d - r (mod 2)``.  The complementary
stratum ``(n - k, mu)`` is *not* identified with ``(k, mu)``; the range of
``k`` already picks one representative.  Non-emptiness of a stratum is a
separate question answered by :func:`stratum_realizable`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

from . import InconsistentDataError

Perm = tuple


# -- permutations -----------------------------------------------------------

def identity(d: int) -> Perm:
    return tuple(range(d))


def perm_from_cycles(cycles: Iterable[Sequence[int]], d: int) -> Perm:
    """Build a permutation of ``d`` symbols from 1-based cycles."""
    img = list(range(d))
    seen = set()
    for cyc in cycles:
        cyc = [int(c) - 1 for c in cyc]
        for c in cyc:
            if not 0 <= c < d:
                raise InconsistentDataError(f"symbol {c + 1} outside 1..{d}")
            if c in seen:
                raise InconsistentDataError(f"symbol {c + 1} repeated in cycles")
            seen.add(c)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return tuple(img)


def perm_to_cycles(p: Perm) -> list[list[int]]:
    """1-based cycle notation, fixed points omitted."""
    out, seen = [], set()
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc, c = [], start
        while c not in seen:
            seen.add(c)
            cyc.append(c + 1)
            c = p[c]
        out.append(cyc)
    return out


def compose(*perms: Perm) -> Perm:
    """Left-to-right product: the first permutation is applied first."""
    if not perms:
        raise ValueError("empty product")
    d = len(perms[0])
    if any(len(p) != d for p in perms):
        raise InconsistentDataError("degree mismatch in permutation product")

    def mul(s, t):
        return tuple(t[s[i]] for i in range(d))

    return reduce(mul, perms)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def cycle_lengths(p: Perm) -> list[int]:
    lengths, seen = [], set()
    for start in range(len(p)):
        if start in seen:
            continue
        n, c = 0, start
        while c not in seen:
            seen.add(c)
            c = p[c]
            n += 1
        lengths.append(n)
    return sorted(lengths, reverse=True)


def is_transposition(p: Perm) -> bool:
    return sum(1 for i, j in enumerate(p) if i != j) == 2


def transpositions(d: int) -> list[Perm]:
    out = []
    for i, j in itertools.combinations(range(d), 2):
        img = list(range(d))
        img[i], img[j] = j, i
        out.append(tuple(img))
    return out


def orbits(perms: Sequence[Perm], d: int) -> list[frozenset]:
    parent = list(range(d))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in perms:
        for i, j in enumerate(p):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    groups: dict[int, set] = {}
    for i in range(d):
        groups.setdefault(find(i), set()).add(i)
    return [frozenset(s) for s in groups.values()]


def is_transitive(perms: Sequence[Perm], d: int) -> bool:
    return len(orbits(perms, d)) == 1


# -- profiles and covers ----------------------------------------------------

@dataclass(frozen=True)
class RamificationProfile:
    """Partition ``[m_1 >= ... >= m_r]`` of the degree."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(m) for m in self.parts)
        if not parts:
            raise InconsistentDataError("ramification profile must be nonempty")
        if any(m < 1 for m in parts):
            raise InconsistentDataError(f"non-positive ramification index in {parts}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @property
    def degree(self) -> int:
        return sum(self.parts)

    @property
    def r(self) -> int:
        return len(self.parts)

    @property
    def lcm(self) -> int:
        return reduce(math.lcm, self.parts)

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.parts)) + "]"


def partitions(d: int, largest: int | None = None):
    """Partitions of ``d`` in weakly decreasing order, lexicographically descending."""
    largest = d if largest is None else largest
    if d == 0:
        yield ()
        return
    for m in range(min(d, largest), 0, -1):
        for rest in partitions(d - m, m):
            yield (m,) + rest


@dataclass(frozen=True)
class BoundaryStratum:
    k: int
    profile: RamificationProfile

    @property
    def lcm(self) -> int:
        return self.profile.lcm

    @property
    def branch_count(self) -> int:
        return math.prod(self.profile.parts) // self.lcm

    def key(self):
        return (self.k, self.profile.parts)


@dataclass(frozen=True)
class MonodromyCover:
    degree: int
    branch_values: tuple
    monodromy: tuple
    infinity_profile: RamificationProfile | None = None
    genus: int | None = field(default=None, compare=False)


def genus_from_branching(d: int, n_simple: int,
                         profile: RamificationProfile | None = None) -> int:
    """Genus from the count of simple branch points.

    Without a profile ``n = 2g + 2d - 2``; with a profile ``mu`` over one
    fixed value ``n(mu) = 2g + d + r - 2``.
    """
    if d <= 0 or n_simple < 0:
        raise InconsistentDataError("inconsistent branching data")
    if profile is None:
        num = n_simple - 2 * d + 2
    else:
        if profile.degree != d:
            raise InconsistentDataError("inconsistent branching data")
        num = n_simple - d - profile.r + 2
    if num < 0 or num % 2:
        raise InconsistentDataError("inconsistent branching data")
    return num // 2


def validate_cover(cover: MonodromyCover) -> MonodromyCover:
    """Check the monodromy invariants and return the cover with its genus."""
    d = cover.degree
    perms = [tuple(p) for p in cover.monodromy]
    if len(perms) != len(cover.branch_values):
        raise InconsistentDataError("one permutation per branch value required")
    if len(set(complex(z) for z in cover.branch_values)) != len(perms):
        raise InconsistentDataError("branch values must be distinct")
    for p in perms:
        if sorted(p) != list(range(d)):
            raise InconsistentDataError(f"{p} is not a permutation of {d} symbols")
    for p in perms:
        if not is_transposition(p):
            raise InconsistentDataError("non-transposition at simple point")
    total = compose(*perms) if perms else identity(d)
    mu = cover.infinity_profile
    if mu is None:
        if total != identity(d):
            raise InconsistentDataError("product not identity")
    elif RamificationProfile(tuple(cycle_lengths(inverse(total)))) != mu:
        raise InconsistentDataError("product not identity")
    if not is_transitive(perms, d):
        raise InconsistentDataError("not transitive")
    # Riemann-Hurwitz
    ram = sum(d - len(cycle_lengths(p)) for p in perms)
    if mu is not None:
        ram += d - mu.r
    two_g = ram - 2 * d + 2
    g = two_g // 2
    if two_g < 0 or two_g % 2 or g != genus_from_branching(d, len(perms), mu):
        raise InconsistentDataError("inconsistent branching data")
    return MonodromyCover(d, tuple(cover.branch_values), tuple(perms), mu, g)


def node_profile(perms: Sequence[Perm]) -> RamificationProfile:
    """Cycle type of the ordered product ``s_1 ... s_k``."""
    if not perms:
        raise ValueError("node_profile needs at least one permutation")
    return RamificationProfile(tuple(cycle_lengths(compose(*perms))))


def enumerate_strata(g: int, d: int) -> list[BoundaryStratum]:
    if g < 0 or d < 2:
        raise InconsistentDataError("need g >= 0 and d >= 2")
    out = []
    for k in range(2, g + d):
        for parts in partitions(d):
            if (k - (d - len(parts))) % 2 == 0:
                out.append(BoundaryStratum(k, RamificationProfile(parts)))
    return out


class SearchBudgetExceeded(RuntimeError):
    pass


def stratum_realizable(g: int, d: int, stratum: BoundaryStratum, *,
                       full_cover: bool = True, budget: int = 5_000_000,
                       max_degree: int = 6, max_k: int = 10) -> bool:
    """Exhaustive existence check for a stratum.

    Searches tuples of transpositions ``t_1..t_k`` whose product has cycle
    type ``mu``; with ``full_cover`` the tuple must extend by ``n - k`` more
    transpositions to a transitive tuple with identity product (``n`` simple
    branch points of genus ``g``).  The search runs over states
    ``(partial product, orbit partition)`` level by level, which is
    exhaustive but avoids enumerating tuples one by one.
    """
    n = 2 * g + 2 * d - 2
    if d > max_degree or stratum.k > max_k:
        raise SearchBudgetExceeded("search budget exceeded")
    if stratum.profile.degree != d or not 2 <= stratum.k <= g + d - 1:
        return False
    trans = transpositions(d)
    work = 0

    def step(states):
        nonlocal work
        new = set()
        for prod, part in states:
            for t in trans:
                work += 1
                if work > budget:
                    raise SearchBudgetExceeded("search budget exceeded")
                a, b = [i for i in range(d) if t[i] != i]
                blocks = [blk for blk in part if a not in blk and b not in blk]
                merged = frozenset().union(*[blk for blk in part if a in blk or b in blk])
                new.add((compose(prod, t), frozenset(blocks + [merged])))
        return new

    start = frozenset(frozenset([i]) for i in range(d))
    states = {(identity(d), start)}
    for _ in range(stratum.k):
        states = step(states)
    target = stratum.profile.parts
    states = {s for s in states if tuple(cycle_lengths(s[0])) == target}
    if not full_cover or not states:
        return bool(states)
    for _ in range(n - stratum.k):
        states = step(states)
    return any(prod == identity(d) and len(part) == 1 for prod, part in states)


def automorphism_count(cover: MonodromyCover) -> int:
    """Order of the centralizer in ``S_d`` of the monodromy group."""
    d = cover.degree
    gens = [tuple(p) for p in cover.monodromy]
    count = 0
    for h in itertools.permutations(range(d)):
        if all(compose(h, s) == compose(s, h) for s in gens):
            count += 1
    return count


# -- JSON descriptor --------------------------------------------------------

def cover_from_json(obj: dict) -> MonodromyCover:
    try:
        d = int(obj["degree"])
        zs = tuple(complex(re, im) for re, im in obj["branch_values"])
        perms = tuple(perm_from_cycles(cycles, d) for cycles in obj["monodromy"])
        prof = obj.get("infinity_profile")
    except (KeyError, TypeError, ValueError) as exc:
        raise InconsistentDataError(f"malformed cover descriptor: {exc}") from exc
    mu = RamificationProfile(tuple(prof)) if prof else None
    return MonodromyCover(d, zs, perms, mu)


def cover_to_json(cover: MonodromyCover) -> dict:
    return {
        "degree": cover.degree,
        "branch_values": [[complex(z).real, complex(z).imag] for z in cover.branch_values],
        "monodromy": [perm_to_cycles(p) for p in cover.monodromy],
        "infinity_profile": list(cover.infinity_profile.parts) if cover.infinity_profile else None,
    }
