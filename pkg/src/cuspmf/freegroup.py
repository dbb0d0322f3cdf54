"""Reduced words in the free group <a, g> and conjugacy testing.

The pair-of-pants fundamental group <a, b, g | a*b*g = 1> is free on a and g
after eliminating b = a^-1 g^-1.  Loop words map into this group; two loop
words describe the same free homotopy class iff their images are conjugate.
This module is the ground-truth equivalence oracle used by the word
normalization machinery and its tests.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .words import CyclicWord

ALPHA = "a"
GAMMA = "g"


class FreeWord:
    """A fully reduced word: syllables (letter, exponent) with letter in
    {a, g}, nonzero exponents and no two adjacent equal letters."""

    __slots__ = ("syllables",)

    def __init__(self, syllables=()):
        self.syllables = tuple(_reduce(list(syllables)))

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.syllables == other.syllables

    def __hash__(self):
        return hash(self.syllables)

    def __len__(self):
        """Total letter length (sum of |exponent|)."""
        return sum(abs(e) for _, e in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __mul__(self, other: FreeWord) -> FreeWord:
        return FreeWord(self.syllables + other.syllables)

    def inverse(self) -> FreeWord:
        return FreeWord(tuple((l, -e) for l, e in reversed(self.syllables)))

    def letters(self) -> tuple:
        """Expansion into single signed letters, e.g. a^-2 g -> ((a,-1),(a,-1),(g,1))."""
        out = []
        for l, e in self.syllables:
            s = 1 if e > 0 else -1
            out.extend((l, s) for _ in range(abs(e)))
        return tuple(out)

    def __str__(self):
        if not self.syllables:
            return "1"
        return "".join(l if e == 1 else f"{l}^{e}" for l, e in self.syllables)

    __repr__ = __str__


def _reduce(syllables):
    out = []
    for l, e in syllables:
        if e == 0:
            continue
        if out and out[-1][0] == l:
            s = out[-1][1] + e
            if s == 0:
                out.pop()
            else:
                out[-1] = (l, s)
        else:
            out.append((l, e))
    return out


def alpha(e: int = 1) -> FreeWord:
    return FreeWord(((ALPHA, e),))


def gamma(e: int = 1) -> FreeWord:
    return FreeWord(((GAMMA, e),))


def beta(e: int = 1) -> FreeWord:
    """b^e with b = a^-1 g^-1 eliminated at construction time."""
    if e >= 0:
        return FreeWord(((ALPHA, -1), (GAMMA, -1)) * e)
    return FreeWord(((GAMMA, 1), (ALPHA, 1)) * (-e))


def from_loop_word(w: CyclicWord) -> FreeWord:
    """The element a^{l1} b^{m1} g^{n1} ... of <a, g>, fully reduced."""
    if w.kind != "loop":
        raise ValueError("from_loop_word expects a loop word")
    syl = []
    for i in range(w.tau):
        l, m, n = w.entries[3 * i], w.entries[3 * i + 1], w.entries[3 * i + 2]
        syl.append((ALPHA, l))
        syl.extend(beta(m).syllables)
        syl.append((GAMMA, n))
    return FreeWord(syl)


def cyclic_reduce(f: FreeWord) -> FreeWord:
    """Conjugate away matching ends until first letter != last letter."""
    syl = list(f.syllables)
    while len(syl) >= 2 and syl[0][0] == syl[-1][0]:
        l, e_head = syl[0]
        _, e_tail = syl.pop()
        merged = e_head + e_tail
        syl.pop(0)
        if merged:
            syl.insert(0, (l, merged))
        syl = _reduce(syl)
    return FreeWord(syl)


def _canonical_cycle(f: FreeWord) -> tuple:
    """Lexicographically least rotation of the letter expansion of the cyclic
    reduction; a complete conjugacy invariant for free groups."""
    letters = cyclic_reduce(f).letters()
    if not letters:
        return ()
    n = len(letters)
    doubled = letters + letters
    return min(doubled[i:i + n] for i in range(n))


def conjugate_equal(f: FreeWord, g: FreeWord) -> bool:
    return _canonical_cycle(f) == _canonical_cycle(g)


def is_essential(w: CyclicWord) -> bool:
    """False iff the class is trivial or winds a single puncture (a power of
    a, g, or b; the last appears as an alternating (g a)-cycle)."""
    cyc = _canonical_cycle(from_loop_word(w))
    if not cyc:
        return False
    letters_used = {l for l, _ in cyc}
    if len(letters_used) == 1:
        return False
    signs = {s for _, s in cyc}
    if len(signs) == 1:
        # A beta power reduces to (a^-1 g^-1)^m or (g a)^m: strictly
        # alternating letters of a single sign.
        alternating = all(cyc[i][0] != cyc[(i + 1) % len(cyc)][0]
                          for i in range(len(cyc)))
        if alternating:
            return False
    return True
