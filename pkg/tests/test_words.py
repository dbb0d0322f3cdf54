"""Cyclic words: moves, normality, the normalization chain, periodicity."""

from __future__ import annotations

import random

import pytest

from cuspmf import freegroup
from cuspmf.words import (
    CyclicWord,
    InvalidMove,
    NotEssential,
    apply_move,
    canonical_shift,
    equal_up_to_shift,
    is_normal,
    normalize,
    period,
    shift,
)


def loop(*entries):
    return CyclicWord(tuple(entries), "loop")


def test_shift_is_by_triples():
    w = loop(1, 2, 3)
    assert shift(w, 0) == w
    w6 = loop(1, 2, 3, 4, 5, 6)
    assert shift(w6, 1) == loop(4, 5, 6, 1, 2, 3)
    assert shift(shift(w6, 1), w6.tau - 1) == w6


def test_is_normal_examples():
    assert not is_normal(loop(-1, -1, -1))
    assert is_normal(loop(3, -2, 2))
    assert not is_normal(loop(0, 0, 3))
    ok, violations = is_normal(loop(0, 0, 3), with_violations=True)
    assert not ok and violations


def test_moves_examples():
    assert apply_move(loop(1, -2, 0), "Insert000", pos=0) == loop(0, 0, 0, 1, -2, 0)
    # AddOnesAroundZero on (l', 0, n') at j = 2
    assert apply_move(loop(5, 0, 7), "AddOnesAroundZero", j=2) == loop(6, 1, 8)
    assert apply_move(loop(2, 1, 0), "SubtractOnesAroundOne", j=2) == loop(1, 0, -1)
    with pytest.raises(InvalidMove):
        apply_move(loop(2, 1, 0), "AddOnesAroundZero", j=1)
    with pytest.raises(InvalidMove):
        apply_move(loop(1, 2, 3), "Remove000", pos=0)
    w = apply_move(loop(1, -2, 0), "Insert000", pos=2)
    assert w == loop(1, -2, 0, 0, 0, 0)
    assert apply_move(w, "Remove000", pos=3) == loop(1, -2, 0)


def test_moves_preserve_length_mod_3_and_class():
    rng = random.Random(99)
    for _ in range(80):
        tau = rng.randint(1, 3)
        w = loop(*[rng.randint(-3, 3) for _ in range(3 * tau)])
        ref = freegroup.from_loop_word(w)
        for _ in range(6):
            w = _random_move(rng, w)
            assert len(w) % 3 == 0
            assert freegroup.conjugate_equal(freegroup.from_loop_word(w), ref)


def _random_move(rng, w):
    options = ["Shift", "Insert000"]
    entries = w.entries
    n = len(entries)
    if n > 3:
        for p in range(n):
            if all(entries[(p + i) % n] == 0 for i in range(3)):
                options.append(("Remove000", p))
                break
    zeros = [j + 1 for j in range(n) if entries[j] == 0]
    ones = [j + 1 for j in range(n) if entries[j] == 1]
    if zeros:
        options.append(("AddOnesAroundZero", rng.choice(zeros)))
    if ones:
        options.append(("SubtractOnesAroundOne", rng.choice(ones)))
    choice = rng.choice(options)
    if choice == "Shift":
        return apply_move(w, "Shift", k=rng.randint(0, w.tau))
    if choice == "Insert000":
        return apply_move(w, "Insert000", pos=rng.randint(0, n))
    move, arg = choice
    if move == "Remove000":
        return apply_move(w, move, pos=arg)
    return apply_move(w, move, j=arg)


def test_normalize_reduction_chain_example():
    # (2,2,2,1,2,2) reduces to (-2,-1,-1) up to shift
    w = normalize(loop(2, 2, 2, 1, 2, 2))
    assert equal_up_to_shift(w, loop(-2, -1, -1))


def test_normalize_already_normal():
    assert normalize(loop(3, -2, 2)) == canonical_shift(loop(3, -2, 2))


def test_normalize_nonnormal_remark():
    # The entry sequence (-2, 0, -3) has normal form (-1, 1, -2) up to shift.
    w = normalize(loop(-2, 0, -3))
    assert equal_up_to_shift(w, loop(-1, 1, -2))


def test_normalize_all_minus_one():
    assert equal_up_to_shift(normalize(loop(-1, -1, -1)), loop(2, 2, 2))
    w = normalize(loop(-1, -1, -1, -1, -1, -1))
    assert equal_up_to_shift(w, loop(2, 2, 2, 2, 2, 2))
    # oracle agreement
    assert freegroup.conjugate_equal(
        freegroup.from_loop_word(loop(-1, -1, -1, -1, -1, -1)),
        freegroup.from_loop_word(loop(2, 2, 2, 2, 2, 2)))


def test_normalize_rejects_non_essential():
    for w in (loop(5, 0, 0), loop(0, 4, 0), loop(0, 0, -2), loop(0, 0, 0)):
        with pytest.raises(NotEssential):
            normalize(w)


def test_normalize_idempotent_and_oracle_random():
    rng = random.Random(4)
    count = 0
    while count < 120:
        tau = rng.randint(1, 4)
        w = loop(*[rng.randint(-4, 4) for _ in range(3 * tau)])
        if not freegroup.is_essential(w):
            continue
        count += 1
        nw = normalize(w)
        assert is_normal(nw)
        assert freegroup.conjugate_equal(
            freegroup.from_loop_word(w), freegroup.from_loop_word(nw))
        assert normalize(nw) == nw


def test_normalize_invariant_under_moves():
    rng = random.Random(8)
    count = 0
    while count < 40:
        tau = rng.randint(1, 3)
        w = loop(*[rng.randint(-3, 3) for _ in range(3 * tau)])
        if not freegroup.is_essential(w):
            continue
        count += 1
        base = normalize(w)
        moved = w
        for _ in range(8):
            moved = _random_move(rng, moved)
        assert equal_up_to_shift(normalize(moved), base)


def test_period():
    assert period(loop(1, 2, 3, 1, 2, 3)) == (True, loop(1, 2, 3), 2)
    assert period(loop(1, 2, 3)) == (False, loop(1, 2, 3), 1)
    assert period(loop(2, 2, 2, 2, 2, 2)) == (True, loop(2, 2, 2), 2)
    # exhaustive divisor oracle on a 12-entry word
    w = loop(1, 0, -1, 1, 0, -1, 1, 0, -1, 1, 0, -1)
    is_p, base, reps = period(w)
    assert (is_p, base, reps) == (True, loop(1, 0, -1), 4)


def test_parse_and_json():
    w = CyclicWord.parse("6,0,2,-1,0,-3,0,0,5,0,-2,1,-1,3,4", "band")
    assert w.tau == 5
    assert CyclicWord.from_json(w.to_json()) == w


def test_datum_json_roundtrip():
    from fractions import Fraction
    from cuspmf.words import BandDatum, LoopDatum, UnitMonomial
    b = BandDatum(CyclicWord((1, -2, 0), "band"), UnitMonomial(Fraction(3, 2), -1))
    data = b.to_json()
    assert data["kind"] == "band" and data["lambda"]["lam_exp"] == -1
    assert BandDatum.from_json(data) == b
    l = LoopDatum(CyclicWord((3, -2, 2), "loop"), UnitMonomial(Fraction(-1), 1))
    assert LoopDatum.from_json(l.to_json()) == l


def test_normalize_larger_words_oracle():
    rng = random.Random(15)
    checked = 0
    while checked < 30:
        tau = rng.randint(4, 5)
        w = loop(*[rng.randint(-4, 4) for _ in range(3 * tau)])
        if not freegroup.is_essential(w):
            continue
        checked += 1
        nw = normalize(w)
        assert is_normal(nw)
        assert freegroup.conjugate_equal(
            freegroup.from_loop_word(w), freegroup.from_loop_word(nw))
