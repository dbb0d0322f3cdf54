"""The x^3 + y^2 + xyz family: products, presentations, AR translation."""

from __future__ import annotations

import pytest

from cuspmf import t32
from cuspmf.ring import Poly, RatFunc, X, Y, Z
from cuspmf.words import UnitMonomial

LAM = UnitMonomial()


def lamp(e=1):
    return Poly.lam(e)


def test_r_series_values():
    assert t32.r_series(1) == -lamp(-1)
    assert t32.r_series(2) == lamp(-1) * Z
    assert t32.r_series(3) == lamp(-1) * X - lamp(-1) * Z * Z
    with pytest.raises(ValueError):
        t32.r_series(0)


def test_build_m1_matches_display():
    fact = t32.build_t32(1)
    den = Poly.one() + lamp(-1)
    a11 = RatFunc((lamp() * X + X) * den - Z * Z, den)
    a12 = RatFunc(-(Y * den) - X * Z, den)
    a21 = RatFunc(Y * den + lamp(-1) * X * Z, den)
    a22 = RatFunc(lamp(-1) * X * X, den)
    assert fact.P1.entries[0][0] == a11
    assert fact.P1.entries[0][1] == a12
    assert fact.P1.entries[1][0] == a21
    assert fact.P1.entries[1][1] == a22
    # denominator normalization: 1 - r = 1 + lam^-1
    assert Poly.one() - fact.r == den


def test_symmetry_relations():
    for m in (1, 2, 3, 4):
        f = t32.build_t32(m)
        assert f.P2.entries[1][1] == f.P1.entries[0][0]   # a'22 = a11
        assert f.P2.entries[0][0] == f.P1.entries[1][1]   # a'11 = a22
        assert f.P2.entries[0][1] == -f.P1.entries[0][1]  # a'12 = -a12
        assert f.P2.entries[1][0] == -f.P1.entries[1][0]  # a'21 = -a21


def test_a22_closed_form():
    f = t32.build_t32(3)
    assert f.P1.entries[1][1] == RatFunc(lamp(-1) * X * X,
                                         Poly.one() - t32.r_series(3))


def test_products_m1_to_6():
    for m in range(1, 7):
        fact = t32.build_t32(m)
        assert t32.verify_product(fact) == "+xyz", m


def test_presentation_cofactors():
    # m = 1: (1 + lam) W;  m = 2: (lam - z) W;  m = 3: (1 - r) W
    ok, cof = t32.check_presentation(t32.ideal_row(1), t32.build_t32(1).P1,
                                     t32.W_PLUS)
    assert ok and cof == RatFunc(Poly.one() + lamp())
    ok, cof = t32.check_presentation(t32.ideal_row(2), t32.build_t32(2).P1,
                                     t32.W_PLUS)
    assert ok and cof == RatFunc(lamp() - Z)
    ok, cof = t32.check_presentation(t32.ideal_row(3), t32.build_t32(3).P1,
                                     t32.W_PLUS)
    assert ok and cof == RatFunc(Poly.one() - t32.r_series(3))
    # higher m keep working with the (1 - r) cofactor
    for m in (4, 5, 6):
        ok, cof = t32.check_presentation(t32.ideal_row(m), t32.build_t32(m).P1,
                                         t32.W_PLUS)
        assert ok and cof == t32.expected_cofactor(m), m


def test_presentation_rejects_wrong_row():
    bad = (X * X, Y)
    ok, _ = t32.check_presentation(bad, t32.build_t32(1).P1, t32.W_PLUS)
    assert not ok


def test_z_negation_bridges_conventions():
    assert t32.W_PLUS.substitute_z_negate() == t32.W_MINUS
    fact = t32.build_t32(2)
    p1 = t32._negate_z_matrix(fact.P1)
    p2 = t32._negate_z_matrix(fact.P2)
    from cuspmf import mfcore
    assert mfcore.verify_mf(p1, p2, t32.W_MINUS, Poly.one())


def test_ar_swap_m1():
    assert t32.ar_swap_check(LAM)
    p1, p2 = t32.ar_pair_m1(LAM)
    from cuspmf import mfcore
    assert mfcore.verify_mf(p1, p2, t32.W_MINUS, Poly.one())


def test_verify_t32_summary():
    res = t32.verify_t32(1)
    assert res == {"m": 1, "product_convention": "+xyz",
                   "presentation_ok": True, "cofactor_matches": True,
                   "ar_swap_ok": True}
