"""Band <-> loop conversion formulas and the rank-one correction table."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from cuspmf import convert
from cuspmf.words import (
    BandDatum, CyclicWord, LoopDatum, NotNormal, UnitMonomial, is_normal,
)

GOLDEN_W = (6, 0, 2, -1, 0, -3, 0, 0, 5, 0, -2, 1, -1, 3, 4)
GOLDEN_DELTA = (1, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1, 1)
GOLDEN_EPS = (2, 2, 1, 0, -1, -1, -1, 0, 0, 0, 0, 0, 1, 1, 2)
GOLDEN_WPRIME = (8, 2, 3, -1, -1, -4, -1, 0, 5, 0, -2, 1, 0, 4, 6)


def band(*entries, lam=UnitMonomial()):
    return BandDatum(CyclicWord(tuple(entries), "band"), lam)


def test_example_8_3_forward():
    b = band(*GOLDEN_W)
    loop, delta, eps = convert.band_to_loop(b)
    assert delta.bits == GOLDEN_DELTA
    assert eps.values == GOLDEN_EPS
    assert loop.word.entries == GOLDEN_WPRIME
    # lambda' = (-1)^(6-1+0+0-1+5) lambda = -lambda
    assert loop.holonomy == UnitMonomial(Fraction(-1), 1)
    assert is_normal(loop.word)


def test_example_8_3_roundtrip():
    b = band(*GOLDEN_W)
    loop, _, _ = convert.band_to_loop(b)
    back = convert.band_from_loop(loop)
    assert back.word.entries == GOLDEN_W
    assert back.eigenvalue == b.eigenvalue


def test_degenerate_pairing():
    loop, delta, eps = convert.band_to_loop(band(0, 0, 0))
    assert delta.bits == (1, 1, 1)
    assert eps.values == (2, 2, 2)
    assert loop.word.entries == (2, 2, 2)
    assert loop.holonomy == UnitMonomial(Fraction(-1), 1)
    back = convert.band_from_loop(LoopDatum(CyclicWord((2, 2, 2), "loop")))
    assert back.word.entries == (0, 0, 0)


def test_spec_example_1m20():
    loop, delta, eps = convert.band_to_loop(band(1, -2, 0))
    assert delta.bits == (1, 0, 0)
    assert eps.values == (0, 0, 0)
    assert loop.word.entries == (1, -2, 0)


def test_inverse_example_3m22():
    # delta' = (1,0,1) so every position sees two positive neighbours
    # cyclically: eps' = (1,1,1) and the band word is (2,-3,1).
    l = LoopDatum(CyclicWord((3, -2, 2), "loop"))
    b = convert.band_from_loop(l)
    assert convert.sign_word_of_loop(l.word).bits == (1, 0, 1)
    assert b.word.entries == (2, -3, 1)
    roundtrip, _, _ = convert.band_to_loop(b)
    assert roundtrip.word.entries == (3, -2, 2)


def test_band_from_loop_rejects_non_normal():
    with pytest.raises(NotNormal):
        convert.band_from_loop(LoopDatum(CyclicWord((0, 0, 3), "loop")))


def test_correction_table_values():
    assert convert.correction_number_rank1(1, 2, 3) == 2
    assert convert.correction_number_rank1(1, -2, 0) == 0
    assert convert.correction_number_rank1(-1, -1, -3) == -1
    assert convert.correction_number_rank1(2, 1, -1) == 1


def test_correction_table_matches_epsilon_exhaustive():
    for l, m, n in itertools.product(range(-4, 5), repeat=3):
        _, _, eps = convert.band_to_loop(band(l, m, n))
        table = convert.correction_number_rank1(l, m, n)
        assert eps.values == (table, table, table), (l, m, n)


def test_roundtrip_exhaustive_length3():
    for l, m, n in itertools.product(range(-4, 5), repeat=3):
        b = band(l, m, n)
        loop, delta, _ = convert.band_to_loop(b)
        assert is_normal(loop.word), (l, m, n)
        # delta(w) = delta'(w + eps(w)): the key identity of the inverse proof
        assert convert.sign_word_of_loop(loop.word).bits == delta.bits
        back = convert.band_from_loop(loop)
        assert back.word.entries == (l, m, n)
        assert back.eigenvalue == b.eigenvalue


def test_roundtrip_random():
    rng = random.Random(42)
    for _ in range(400):
        tau = rng.randint(1, 8)
        entries = tuple(rng.randint(-5, 5) for _ in range(3 * tau))
        b = band(*entries)
        loop, delta, _ = convert.band_to_loop(b)
        assert is_normal(loop.word)
        assert convert.sign_word_of_loop(loop.word).bits == delta.bits
        back = convert.band_from_loop(loop)
        assert back.word.entries == entries
        assert back.eigenvalue == b.eigenvalue
        # loop-side roundtrip
        again, _, _ = convert.band_to_loop(back)
        assert again.word == loop.word and again.holonomy == loop.holonomy


def test_sign_word_zero_run_structure():
    """Within any maximal zero run the bits are constant, and are 1 only when
    both flanking nonzero entries are positive (vacuously for all-zero)."""
    rng = random.Random(77)
    for _ in range(300):
        tau = rng.randint(1, 6)
        entries = tuple(rng.choice([-2, -1, 0, 0, 1, 2]) for _ in range(3 * tau))
        delta = convert.sign_word(CyclicWord(entries, "band")).bits
        n = len(entries)
        if all(v == 0 for v in entries):
            assert delta == (1,) * n
            continue
        for j in range(n):
            if entries[j] != 0:
                assert delta[j] == (1 if entries[j] > 0 else 0)
                continue
            # find the flanking nonzero entries of the zero run through j
            a = j
            while entries[(a - 1) % n] == 0:
                a -= 1
            b = j
            while entries[(b + 1) % n] == 0:
                b += 1
            left, right = entries[(a - 1) % n], entries[(b + 1) % n]
            run_bits = {delta[k % n] for k in range(a, b + 1)}
            assert len(run_bits) == 1
            assert (run_bits == {1}) == (left > 0 and right > 0)
