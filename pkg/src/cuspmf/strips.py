"""Word-combinatorial strip oracle for the tau = 1 mirror matrix entries.

Strips between the loop and the reference hexagonal loop are encoded as letter
sequences over {lx, ly, lz, tx, ty, tz} (t* are the far-side segments).
The opposed-orientation sequences obey a three-rule grammar; each valid
terminal sequence carries a based-path word in the free group and a monomial
contribution.  The oracle enumerates sequences up to a length bound, matches
their words against the prefixes of the loop's based path, and recovers the
entry magnitudes of the mirror matrix independently of its closed form.
Signs and holonomy are outside the oracle's scope.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import freegroup as fg
from .ring import Poly
from .words import CyclicWord, NotNormal, is_normal


class Incomplete(RuntimeError):
    """max_len was exhausted with candidate sequences still open."""


# letters: plain lx/ly/lz, far-side tx/ty/tz; a strip boundary in a block of
# winding around the x puncture repeats (tz ty lx), and similarly cyclically.

_END_OF_PLAIN = {"x": "u", "y": "s", "z": "t"}   # u, s, t sit on lx, ly, lz
_NEXT_BLOCK = {"x": "y", "y": "z", "z": "x"}


@dataclass(frozen=True)
class StripHit:
    end: str            # one of s, t, u
    monomial: Poly      # the magnitude contribution
    length: int         # letters consumed


def _rotate_word(w: tuple[int, int, int], start: str) -> tuple[int, int, int]:
    """The x->y->z symmetry: starting at q (resp. r) reads the word rotated."""
    l, m, n = w
    if start == "p":
        return (l, m, n)
    if start == "q":
        return (m, n, l)
    if start == "r":
        return (n, l, m)
    raise ValueError("start must be one of p, q, r")


def _unrotate_var(var: str, start: str) -> str:
    """Map the rotated-alphabet variable back to the true one."""
    order = "xyz"
    shift = {"p": 0, "q": 1, "r": 2}[start]
    return order[(order.index(var) + shift) % 3]


def _unrotate_end(end: str, start: str) -> str:
    order = "stu"
    shift = {"p": 0, "q": 1, "r": 2}[start]
    return order[(order.index(end) + shift) % 3]


def _targets(word: tuple[int, int, int], wraps: int = 3):
    """Based-path prefixes of the backward traversal of the loop from p_1.

    Walking against the orientation from p_1 meets u, t, s in order, once per
    wrap; the accumulated class after reaching each point is the reduced word
    of a^-l, then a^-l g^-n, then a^-l g^-n b^-m, and so on around again.
    Every strip block winds its puncture at least once, so a prefix with a
    zero leg has no sequence realization and is dropped (without this, a zero
    leg makes two distinct end points carry the same group element).
    """
    l, m, n = word
    out = []
    acc = fg.FreeWord()
    realizable = True
    for _ in range(wraps):
        for exp, end in ((l, "u"), (n, "t"), (m, "s")):
            gen = {"u": fg.alpha, "t": fg.gamma, "s": fg.beta}[end]
            acc = acc * gen(-exp)
            if exp == 0:
                realizable = False
            if realizable:
                out.append((end, acc))
    return out


def _enumerate_opposed(max_len: int, target_letters: list[tuple]):
    """All terminal grammar sequences from lx, with per-block loop counts.

    Yields (end_block, counts, word_syllables, length, closed); open states
    cut by the length bound come with closed = False.  Candidate words only
    grow letter by letter (block junctions never cancel), so branches whose
    committed letters fail to prefix every target are pruned.
    """

    def live(word_exps) -> bool:
        committed = _word_from_blocks("x", word_exps).letters()
        for t in target_letters:
            if len(committed) <= len(t) and t[:len(committed)] == committed:
                return True
        return False

    # state: (block, loops_in_block, word_so_far, counts, length)
    stack = [("x", 0, (), {"x": 0, "y": 0, "z": 0}, 1)]
    while stack:
        block, loops, word, counts, length = stack.pop()
        # the walk sits on the plain letter of `block`: a terminal candidate
        yield (block, dict(counts), word + (-loops - 1,), length, True)
        # extend: plain -> far-side (1 letter), then either loop back (2 more)
        # or move to the next block's plain letter (1 more); a cut branch
        # reports the longest word prefix shared by all its continuations
        if live(word + (-loops - 2,)):
            if length + 3 <= max_len:
                c2 = dict(counts)
                c2[block] += 1
                stack.append((block, loops + 1, word, c2, length + 3))
            else:
                yield (block, dict(counts), word + (-loops - 2,), length, False)
        if live(word + (-loops - 1, -1)):
            if length + 2 <= max_len:
                stack.append((_NEXT_BLOCK[block], 0, word + (-loops - 1,),
                              counts, length + 2))
            else:
                yield (block, dict(counts), word + (-loops - 1,), length, False)


def _word_from_blocks(first_block: str, exps: tuple[int, ...]) -> fg.FreeWord:
    """alpha^e1 beta^e2 gamma^e3 ... starting at the letter of first_block."""
    gens = {"x": fg.alpha, "y": fg.beta, "z": fg.gamma}
    block = first_block
    acc = fg.FreeWord()
    for e in exps:
        acc = acc * gens[block](e)
        block = _NEXT_BLOCK[block]
    return acc


def enumerate_strips(w_prime: CyclicWord, start: str = "p",
                     max_len: int = 40) -> list[StripHit]:
    """Entries of the mirror-matrix column of `start`, up to sign/holonomy.

    Only tau = 1 normal words are supported.  Raises Incomplete when the
    length bound cuts off a sequence whose word could still match a target.
    """
    if w_prime.tau != 1:
        raise ValueError("the strip oracle is written out for tau = 1 only")
    ok, violations = is_normal(w_prime, with_violations=True)
    if not ok:
        raise NotNormal(f"strip oracle needs a normal word: {violations}")
    word = _rotate_word(tuple(w_prime.entries), start)
    l, m, n = word

    hits: list[StripHit] = []
    # aligned orientation: the corner triangle, and the bigon chain when the
    # middle exponent is nonpositive
    hits.append(StripHit(_unrotate_end("s", start),
                         Poly.var(_unrotate_var("z", start)), 3))
    if m <= 0:
        hits.append(StripHit(_unrotate_end("t", start),
                             Poly.var(_unrotate_var("y", start), -m)
                             if -m else Poly.one(), 3 * (-m) + 3))

    # opposed orientation: grammar enumeration matched against the targets;
    # a target needs at least as many strip letters as its word length, so
    # targets beyond the bound are unreachable and dropped
    targets = [(e, t) for e, t in _targets(word) if len(t) <= max_len]
    target_letters = [t.letters() for _, t in targets]
    open_words = []
    for block, counts, exps, length, closed in _enumerate_opposed(
            max_len, target_letters):
        cand = _word_from_blocks("x", exps)
        if not closed:
            open_words.append(cand)
            continue
        end_rot = _END_OF_PLAIN[block]
        for t_end, t_word in targets:
            if t_end == end_rot and cand == t_word:
                mono = Poly.one()
                for var, e in counts.items():
                    if e:
                        mono = mono * Poly.var(_unrotate_var(var, start), e)
                hits.append(StripHit(_unrotate_end(end_rot, start), mono, length))
                break
    for cand in open_words:
        cl = cand.letters()
        for _, t_word in targets:
            tl = t_word.letters()
            if len(cl) < len(tl) and tl[:len(cl)] == cl:
                raise Incomplete(
                    f"open candidate {cand} is a prefix of target {t_word}")
    return hits


def column_magnitudes(w_prime: CyclicWord, start: str = "p",
                      max_len: int = 40) -> dict[str, Poly]:
    """Total contribution per end point (s, t, u), summed over strips."""
    sums: dict[str, Poly] = {}
    for hit in enumerate_strips(w_prime, start, max_len):
        sums[hit.end] = sums.get(hit.end, Poly.zero()) + hit.monomial
    return sums
