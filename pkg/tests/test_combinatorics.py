import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_tau import InconsistentDataError
from hurwitz_tau.combinatorics import (
    BoundaryStratum, MonodromyCover, RamificationProfile, automorphism_count,
    compose, cover_from_json, cover_to_json, cycle_lengths, enumerate_strata,
    genus_from_branching, identity, inverse, node_profile, perm_from_cycles,
    perm_to_cycles, stratum_realizable, transpositions, validate_cover,
)


def tr(i, j, d):
    return perm_from_cycles([[i, j]], d)


@pytest.mark.parametrize("d,n,mu,g", [(2, 6, None, 2), (3, 2, (3,), 0), (2, 2, None, 0)])
def test_genus_from_branching(d, n, mu, g):
    prof = RamificationProfile(mu) if mu else None
    assert genus_from_branching(d, n, prof) == g


def test_genus_parity_error():
    with pytest.raises(InconsistentDataError, match="inconsistent branching data"):
        genus_from_branching(2, 3)


def test_validate_two_sheets():
    c = validate_cover(MonodromyCover(2, (0, 1), (tr(1, 2, 2), tr(1, 2, 2))))
    assert c.genus == 0


def test_validate_s3_tuple():
    s = (tr(1, 2, 3), tr(1, 2, 3), tr(1, 3, 3), tr(1, 3, 3))
    assert validate_cover(MonodromyCover(3, (0, 1, 2, 3), s)).genus == 0


def test_not_transitive():
    s = (tr(1, 2, 3),) * 4
    with pytest.raises(InconsistentDataError, match="not transitive"):
        validate_cover(MonodromyCover(3, (0, 1, 2, 3), s))


def test_product_not_identity():
    s = (tr(1, 2, 3), tr(1, 3, 3))
    with pytest.raises(InconsistentDataError, match="product not identity"):
        validate_cover(MonodromyCover(3, (0, 1), s))


def test_with_infinity_profile():
    # (12)(13) is a 3-cycle: one triple point over infinity
    s = (tr(1, 2, 3), tr(1, 3, 3))
    c = validate_cover(MonodromyCover(3, (0, 1), s, RamificationProfile((3,))))
    assert c.genus == 0


@pytest.mark.parametrize("cycles,d,parts", [
    ([[[1, 2]], [[1, 3]]], 3, (3,)),
    ([[[1, 2]], [[1, 2]]], 2, (1, 1)),
    ([[[1, 2]], [[3, 4]]], 4, (2, 2)),
])
def test_node_profile(cycles, d, parts):
    perms = [perm_from_cycles(c, d) for c in cycles]
    assert node_profile(perms).parts == parts


def test_strata_g2_d2():
    keys = [s.key() for s in enumerate_strata(2, 2)]
    assert keys == [(2, (1, 1)), (3, (2,))]


def test_strata_g0_d2_empty():
    assert enumerate_strata(0, 2) == []


def test_strata_parity_filter():
    k2 = {s.profile.parts for s in enumerate_strata(0, 3) if s.k == 2}
    assert k2 == {(3,), (1, 1, 1)}


@pytest.mark.parametrize("g,d,k,mu,ok", [
    (0, 3, 2, (3,), True),
    (2, 2, 2, (1, 1), True),
    (0, 2, 2, (1, 1), False),
])
def test_realizable(g, d, k, mu, ok):
    assert stratum_realizable(g, d, BoundaryStratum(k, RamificationProfile(mu))) is ok


def test_automorphisms():
    two = validate_cover(MonodromyCover(2, (0, 1), (tr(1, 2, 2),) * 2))
    assert automorphism_count(two) == 2
    s3 = validate_cover(MonodromyCover(3, (0, 1, 2, 3), (tr(1, 2, 3), tr(1, 2, 3), tr(1, 3, 3), tr(1, 3, 3))))
    assert automorphism_count(s3) == 1


def test_json_roundtrip():
    c = MonodromyCover(3, (0j, 1 + 2j), (tr(1, 2, 3), tr(1, 3, 3)), RamificationProfile((3,)))
    back = cover_from_json(cover_to_json(c))
    assert back == c


perms4 = st.permutations(list(range(4))).map(tuple)


@given(perms4, perms4)
def test_compose_inverse(p, q):
    assert compose(p, inverse(p)) == identity(4)
    # cycle type is a conjugacy invariant
    assert sorted(cycle_lengths(compose(inverse(q), p, q))) == sorted(cycle_lengths(p))


@given(perms4)
def test_cycles_roundtrip(p):
    assert perm_from_cycles(perm_to_cycles(p), 4) == p


def _brute_realizable(g, d, k, mu):
    """Independent oracle: enumerate full transposition tuples directly."""
    n = 2 * g + 2 * d - 2
    ts = transpositions(d)
    for tup in itertools.product(ts, repeat=n):
        if compose(*tup) != identity(d):
            continue
        if tuple(cycle_lengths(compose(*tup[:k]))) != mu:
            continue
        seen, todo = {0}, [0]
        while todo:
            a = todo.pop()
            for t in tup:
                if t[a] not in seen:
                    seen.add(t[a])
                    todo.append(t[a])
        if len(seen) == d:
            return True
    return False


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([(0, 3), (1, 2), (0, 4)]))
def test_realizable_matches_tuple_search(gd):
    g, d = gd
    for s in enumerate_strata(g, d):
        want = _brute_realizable(g, d, s.k, s.profile.parts)
        assert stratum_realizable(g, d, s) is want
