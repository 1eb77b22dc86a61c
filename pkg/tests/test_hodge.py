from fractions import Fraction

import pytest

from hurwitz_tau import InconsistentDataError
from hurwitz_tau.hodge import (check_d2_closed_form, hyperelliptic_closed_forms, genus0_k2_vector,
                               hodge_table, stratum_coefficient)


@pytest.mark.parametrize("g,d,k,mu,val", [
    (2, 2, 2, (1, 1), Fraction(1, 5)),
    (2, 2, 3, (2,), Fraction(1, 5)),
    (0, 3, 2, (3,), Fraction(-1, 6)),
    (3, 2, 4, (1, 1), Fraction(2, 7)),
])
def test_stratum_coefficient(g, d, k, mu, val):
    assert stratum_coefficient(g, d, k, mu).value == val


def test_invalid_stratum():
    with pytest.raises(InconsistentDataError):
        stratum_coefficient(2, 2, 2, (2,))


def test_table_g2():
    rows = hodge_table(2, 2)
    assert [r.value for r in rows] == [Fraction(1, 5)] * 2


def test_table_empty():
    assert hodge_table(0, 2) == []


def test_unramified_profile_has_no_defect_term():
    for g in range(2, 8):
        for c in hodge_table(g, 2):
            if c.stratum.profile.parts == (1, 1):
                k, n = c.stratum.k, 2 * g + 2
                assert c.value == Fraction(k * (n - k), 8 * (n - 1))


def _ch_oracle(g, k, mu):
    """Closed forms written out independently of the module."""
    if mu == (1, 1):
        i = k // 2
        return Fraction(i * (g + 1 - i), 4 * g + 2)
    j = (k - 1) // 2
    return Fraction(j * (g - j), 2 * g + 1)


@pytest.mark.parametrize("g", range(2, 21))
def test_d2_closed_forms(g):
    assert check_d2_closed_form(g).passed
    for c in hodge_table(g, 2):
        assert c.value == _ch_oracle(g, c.stratum.k, c.stratum.profile.parts)
    assert set(hyperelliptic_closed_forms(g)) == {c.stratum.key() for c in hodge_table(g, 2)}


def _genus0_oracle(d):
    # independent simplification at k = 2, n = 2d - 2
    n = 2 * d - 2
    base = Fraction(2 * (n - 2), 8 * (n - 1))
    c3 = 3 * (base - Fraction(1, 12) * (d - (Fraction(1, 3) + (d - 3))))
    c22 = 4 * (base - Fraction(1, 12) * (d - (1 + (d - 4))))
    c1 = base
    return c3, c22, c1


@pytest.mark.parametrize("d", range(4, 41))
def test_genus0_vector(d):
    vec = genus0_k2_vector(d)
    assert vec["coefficients"] == _genus0_oracle(d)
    assert vec["scaled"] == (d - 6, -6, 3 * (d - 2))
    assert vec["multiplicity"]["M_d"] == "unresolved"


def test_genus0_special_values():
    assert genus0_k2_vector(6)["c3_vanishes"]
    assert genus0_k2_vector(4)["coefficients"][2] == Fraction(1, 5)
