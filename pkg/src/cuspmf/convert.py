"""Band <-> loop conversion: sign word, correction word, eigenvalue sign rule.

The forward map adds the correction word eps(w) built from the sign word
delta(w); the holonomy picks up the sign (-1)^(l_1+...+l_tau+tau).  The
inverse reads the sign word off the loop word entries directly and is only
defined on normal loop words.  Length-3 band words also carry the standalone
correction-number table.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import BandDatum, CyclicWord, LoopDatum, NotNormal, is_normal


@dataclass(frozen=True)
class SignWord:
    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("sign word entries must be 0 or 1")


@dataclass(frozen=True)
class CorrectionWord:
    values: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (-1, 0, 1, 2) for v in self.values):
            raise ValueError("correction word entries must lie in {-1,0,1,2}")


def sign_word(w: CyclicWord) -> SignWord:
    """delta_j = 0 if w_j < 0 or w_j sits in a zero run with a negative first
    nonzero neighbour; 1 otherwise.  The all-zero word gets delta = 1."""
    e = w.entries
    n = len(e)
    bits = []
    for j in range(n):
        if e[j] < 0:
            bits.append(0)
        elif e[j] > 0:
            bits.append(1)
        else:
            left = right = None
            for step in range(1, n):
                if left is None and e[(j - step) % n] != 0:
                    left = e[(j - step) % n]
                if right is None and e[(j + step) % n] != 0:
                    right = e[(j + step) % n]
                if left is not None and right is not None:
                    break
            negative_neighbour = (left is not None and left < 0) or \
                                 (right is not None and right < 0)
            bits.append(0 if negative_neighbour else 1)
    return SignWord(tuple(bits))


def sign_word_of_loop(w_prime: CyclicWord) -> SignWord:
    """delta'_j = 1 iff w'_j > 0 (the inverse-direction sign word)."""
    return SignWord(tuple(1 if v > 0 else 0 for v in w_prime.entries))


def correction_word(delta: SignWord) -> CorrectionWord:
    bits = delta.bits
    n = len(bits)
    return CorrectionWord(tuple(-1 + bits[(j - 1) % n] + bits[j] + bits[(j + 1) % n]
                                for j in range(n)))


def sign_exponent(band_word: CyclicWord) -> int:
    """(l_1 + ... + l_tau + tau) mod 2, the eigenvalue sign rule."""
    ls = band_word.entries[0::3]
    return (sum(ls) + band_word.tau) % 2


def band_to_loop(b: BandDatum):
    """Convert a band datum; returns (LoopDatum, SignWord, CorrectionWord)."""
    delta = sign_word(b.word)
    eps = correction_word(delta)
    entries = tuple(v + c for v, c in zip(b.word.entries, eps.values))
    w_prime = CyclicWord(entries, "loop")
    hol = b.eigenvalue
    if sign_exponent(b.word):
        hol = hol.negate()
    return LoopDatum(w_prime, hol, b.multiplicity), delta, eps


def band_from_loop(l: LoopDatum) -> BandDatum:
    """Inverse conversion; requires a normal loop word."""
    ok, violations = is_normal(l.word, with_violations=True)
    if not ok:
        raise NotNormal(f"loop word {l.word} is not normal: {violations}")
    delta = sign_word_of_loop(l.word)
    eps = correction_word(delta)
    entries = tuple(v - c for v, c in zip(l.word.entries, eps.values))
    band_word = CyclicWord(entries, "band")
    eig = l.holonomy
    if sign_exponent(band_word):
        eig = eig.negate()
    return BandDatum(band_word, eig, l.multiplicity)


def correction_number_rank1(l: int, m: int, n: int) -> int:
    """The length-3 correction-number table."""
    if l >= 0 and m >= 0 and n >= 0:
        return 2
    if (l > 0 and m > 0 and n < 0) or (l > 0 and m < 0 and n > 0) \
            or (l < 0 and m > 0 and n > 0):
        return 1
    if l <= 0 and m <= 0 and n <= 0 and (l, m, n) != (0, 0, 0):
        return -1
    if (l > 0 and m <= 0 and n <= 0 and (m, n) != (0, 0)) \
            or (m > 0 and n <= 0 and l <= 0 and (n, l) != (0, 0)) \
            or (n > 0 and l <= 0 and m <= 0 and (l, m) != (0, 0)):
        return 0
    raise AssertionError(f"uncovered sign pattern {(l, m, n)}")  # pragma: no cover
