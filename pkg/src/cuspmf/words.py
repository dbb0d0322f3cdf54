"""Cyclic integer words of length 3*tau: band and loop words.

Provides the five equivalence moves, the normality test, the three-stage
normalization chain (weak-normal -> almost-normal -> normal) and periodicity.
Words are immutable; indices are cyclic.  Shifts move whole (l, m, n) triples
so the letter assignment of positions stays fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class InvalidMove(ValueError):
    """A move was requested whose precondition fails."""


class NotEssential(ValueError):
    """Normalization was requested for a word winding a single puncture."""


class NotNormal(ValueError):
    """An operation requiring a normal loop word received a non-normal one."""


@dataclass(frozen=True)
class CyclicWord:
    entries: tuple[int, ...]
    kind: str = "loop"  # "band" | "loop"

    def __post_init__(self):
        if self.kind not in ("band", "loop"):
            raise ValueError(f"unknown word kind {self.kind!r}")
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) == 0 or len(self.entries) % 3 != 0:
            raise ValueError("word length must be a positive multiple of 3")

    @property
    def tau(self) -> int:
        return len(self.entries) // 3

    def __len__(self):
        return len(self.entries)

    def at(self, j: int) -> int:
        """1-based cyclic access, matching the w_j convention."""
        return self.entries[(j - 1) % len(self.entries)]

    def __str__(self):
        return ",".join(str(e) for e in self.entries)

    @staticmethod
    def parse(text: str, kind: str = "loop") -> CyclicWord:
        entries = tuple(int(t) for t in text.replace(" ", "").split(",") if t != "")
        return CyclicWord(entries, kind)

    def to_json(self) -> dict:
        return {"kind": self.kind, "entries": list(self.entries)}

    @staticmethod
    def from_json(data: dict) -> CyclicWord:
        return CyclicWord(tuple(data["entries"]), data.get("kind", "loop"))


@dataclass(frozen=True)
class UnitMonomial:
    """A unit c * lam^e with c a nonzero rational; eigenvalues and holonomies."""
    coeff: Fraction = Fraction(1)
    lam_exp: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff == 0:
            raise ValueError("eigenvalue must be a unit")

    def __mul__(self, other: UnitMonomial) -> UnitMonomial:
        return UnitMonomial(self.coeff * other.coeff, self.lam_exp + other.lam_exp)

    def negate(self) -> UnitMonomial:
        return UnitMonomial(-self.coeff, self.lam_exp)

    def inverse(self) -> UnitMonomial:
        return UnitMonomial(1 / self.coeff, -self.lam_exp)

    def is_one(self) -> bool:
        return self.coeff == 1 and self.lam_exp == 0

    def __str__(self):
        if self.lam_exp == 0:
            return str(self.coeff)
        lam = "λ" if self.lam_exp == 1 else f"λ^{self.lam_exp}"
        if self.coeff == 1:
            return lam
        if self.coeff == -1:
            return f"-{lam}"
        return f"{self.coeff}*{lam}"

    def to_json(self) -> dict:
        return {"num": self.coeff.numerator, "den": self.coeff.denominator,
                "lam_exp": self.lam_exp}

    @staticmethod
    def from_json(data: dict) -> UnitMonomial:
        return UnitMonomial(Fraction(data["num"], data.get("den", 1)),
                            data.get("lam_exp", 0))


FORMAL_LAMBDA = UnitMonomial(Fraction(1), 1)


@dataclass(frozen=True)
class BandDatum:
    word: CyclicWord
    eigenvalue: UnitMonomial = FORMAL_LAMBDA
    multiplicity: int = 1

    def __post_init__(self):
        if self.word.kind != "band":
            raise ValueError("band datum needs a band word")
        if self.multiplicity != 1:
            raise ValueError("only multiplicity 1 is supported")

    def is_degenerate(self) -> bool:
        return set(self.word.entries) == {0} and self.eigenvalue.is_one()

    def to_json(self) -> dict:
        out = self.word.to_json()
        out["lambda"] = self.eigenvalue.to_json()
        return out

    @staticmethod
    def from_json(data: dict) -> BandDatum:
        return BandDatum(CyclicWord(tuple(data["entries"]), "band"),
                         UnitMonomial.from_json(data["lambda"]))


@dataclass(frozen=True)
class LoopDatum:
    word: CyclicWord
    holonomy: UnitMonomial = FORMAL_LAMBDA
    multiplicity: int = 1

    def __post_init__(self):
        if self.word.kind != "loop":
            raise ValueError("loop datum needs a loop word")
        if self.multiplicity != 1:
            raise ValueError("only multiplicity 1 is supported")

    def is_degenerate(self) -> bool:
        return (set(self.word.entries) == {2}
                and self.holonomy == UnitMonomial(Fraction(-1), 0))

    def to_json(self) -> dict:
        out = self.word.to_json()
        out["lambda"] = self.holonomy.to_json()
        return out

    @staticmethod
    def from_json(data: dict) -> LoopDatum:
        return LoopDatum(CyclicWord(tuple(data["entries"]), "loop"),
                         UnitMonomial.from_json(data["lambda"]))


# ---------------------------------------------------------------------------
# shifts and the five equivalence moves
# ---------------------------------------------------------------------------

def shift(w: CyclicWord, k: int) -> CyclicWord:
    """Rotate left by k whole triples, keeping the letter slots fixed."""
    n = len(w.entries)
    r = (3 * k) % n
    return CyclicWord(w.entries[r:] + w.entries[:r], w.kind)


def shift_entries(entries: tuple[int, ...], r: int) -> tuple[int, ...]:
    r %= len(entries)
    return entries[r:] + entries[:r]


def apply_move(w: CyclicWord, move: str, j: int | None = None,
               pos: int | None = None, k: int | None = None) -> CyclicWord:
    """Apply one of the five class-preserving moves.

    move: "Shift" (k triples), "Insert000" (at 0-based pos), "Remove000"
    (triple starting at 0-based pos), "AddOnesAroundZero" (1-based j with
    w_j = 0), "SubtractOnesAroundOne" (1-based j with w_j = 1).
    """
    e = list(w.entries)
    n = len(e)
    if move == "Shift":
        return shift(w, k if k is not None else 1)
    if move == "Insert000":
        p = 0 if pos is None else pos % (n + 1)
        return CyclicWord(tuple(e[:p]) + (0, 0, 0) + tuple(e[p:]), w.kind)
    if move == "Remove000":
        if n <= 3:
            raise InvalidMove("cannot shrink below length 3")
        p = 0 if pos is None else pos % n
        if any(e[(p + i) % n] != 0 for i in range(3)):
            raise InvalidMove(f"no (0,0,0) subword at position {p}")
        if p > n - 3:
            # a seam-wrapping triple: rotate by one triple first so the
            # removal keeps every remaining entry on its letter slot
            e = e[3:] + e[:3]
            p -= 3
        return CyclicWord(tuple(e[:p] + e[p + 3:]), w.kind)
    if move in ("AddOnesAroundZero", "SubtractOnesAroundOne"):
        if j is None:
            raise InvalidMove("move needs the 1-based index j")
        i = (j - 1) % n
        if move == "AddOnesAroundZero":
            if e[i] != 0:
                raise InvalidMove(f"w_{j} = {e[i]} is not 0")
            d = 1
        else:
            if e[i] != 1:
                raise InvalidMove(f"w_{j} = {e[i]} is not 1")
            d = -1
        for off in (-1, 0, 1):
            e[(i + off) % n] += d
        return CyclicWord(tuple(e), w.kind)
    raise InvalidMove(f"unknown move {move!r}")


# ---------------------------------------------------------------------------
# normality (Definition: four cyclic subword conditions)
# ---------------------------------------------------------------------------

def is_normal(w: CyclicWord, with_violations: bool = False):
    """Check the four normality conditions on a loop word.

    Returns bool, or (bool, violations) when with_violations is set.
    """
    e = w.entries
    n = len(e)
    violations = []
    for i in range(n):
        a, b = e[(i - 1) % n], e[(i + 1) % n]
        if e[i] == 1 and not (a <= 0 and b <= 0):
            violations.append(f"subword ({a},1,{b}) at {i + 1}")
        if e[i] == 0:
            ok = (a <= -1 and b >= 1) or (a >= 1 and b <= -1) or (a >= 1 and b >= 1)
            if not ok:
                violations.append(f"subword ({a},0,{b}) at {i + 1}")
    # no (0, -1, ..., -1, 0) subword
    for i in range(n):
        if e[i] != 0:
            continue
        j = (i + 1) % n
        steps = 0
        while e[j] == -1 and steps < n:
            j = (j + 1) % n
            steps += 1
        if steps >= 1 and e[j] == 0:
            violations.append(f"subword (0,-1,...,-1,0) starting at {i + 1}")
    if all(v == -1 for v in e):
        violations.append("word is all -1")
    if with_violations:
        return (not violations), violations
    return not violations


# ---------------------------------------------------------------------------
# normalization chain: weak-normal -> almost-normal -> normal
# ---------------------------------------------------------------------------

def _find_cyclic(e: list[int], pattern_pred) -> int | None:
    n = len(e)
    for i in range(n):
        if pattern_pred(i):
            return i
    return None


def _cyclic_splice(e: list[int], start: int, length: int,
                   replacement: list[int]) -> list[int]:
    """Replace the cyclic window [start, start+length) by `replacement`.

    The length change is a multiple of 3 and every surviving entry keeps its
    position mod 3, so the letter slots (and hence the homotopy class rules)
    are untouched.  The output is a representative of the result up to triple
    shift, with replacement[0] on the same letter slot as e[start].
    """
    n = len(e)
    if (length - len(replacement)) % 3:
        raise AssertionError("splice must change length by whole triples")
    rest = [e[(start + length + t) % n] for t in range(n - length)]
    linear = list(replacement) + rest
    m = len(linear)
    p = start % 3
    return [linear[(q - p) % m] for q in range(m)]


def _weak_normal_step(e: list[int]) -> list[int] | None:
    """One length-reducing macro rewrite, or None if already weak-normal.

    Each rewrite removes one triple.  The flank-collapsing degenerate shapes
    only occur for non-essential words and raise NotEssential.
    """
    n = len(e)

    # (c, 0, 0, d) -> (c + d)   and   (c, 1, 1, d) -> (c + d - 1)
    for val, corr in ((0, 0), (1, -1)):
        for i in range(n):
            if e[i] == val and e[(i + 1) % n] == val:
                if n <= 3:
                    raise NotEssential("reduction collapses below one triple")
                c, d = e[(i - 1) % n], e[(i + 2) % n]
                return _cyclic_splice(e, (i - 1) % n, 4, [c + d + corr])

    # (c, 0, -1^k, 0, d) -> (c + 1, 2^{k-1}, d + 1)
    # (c, 1,  2^k, 1, d) -> (c - 1, (-1)^{k-1}, d - 1)
    for lo, mid, dlt, rep in ((0, -1, 1, 2), (1, 2, -1, -1)):
        for i in range(n):
            if e[i] != lo:
                continue
            j = (i + 1) % n
            k = 0
            while e[j] == mid and k < n:
                j = (j + 1) % n
                k += 1
            if k >= 1 and e[j] == lo and j != i:
                if n <= 3 or k >= n - 2:
                    raise NotEssential("run rewrite collapses the word")
                c = e[(i - 1) % n]
                if k == n - 3:
                    # flanks coincide: (c, lo, mid^k, lo) cyclically
                    return _cyclic_splice(e, (i - 1) % n, n,
                                          [c + 2 * dlt] + [rep] * (k - 1))
                d = e[(j + 1) % n]
                return _cyclic_splice(e, (i - 1) % n, k + 4,
                                      [c + dlt] + [rep] * (k - 1) + [d + dlt])
    # full-word forms (lo, mid^{n-1}): (0,-1,...,-1) -> (3,2,...,2) and
    # (1,2,...,2) -> (-2,-1,...,-1), one triple shorter
    for lo, mid, dlt, rep in ((0, -1, 1, 2), (1, 2, -1, -1)):
        if n > 3 and e.count(mid) == n - 1 and e.count(lo) == 1:
            i = e.index(lo)
            return _cyclic_splice(e, i, n, [lo + 3 * dlt] + [rep] * (n - 4))
    return None


def _is_weak_normal(e: list[int]) -> bool:
    n = len(e)
    for i in range(n):
        if e[i] in (0, 1) and e[(i + 1) % n] == e[i]:
            return False
    for lo, mid in ((0, -1), (1, 2)):
        for i in range(n):
            if e[i] != lo:
                continue
            j = (i + 1) % n
            k = 0
            while e[j] == mid and k < n:
                j = (j + 1) % n
                k += 1
            if k >= 1 and (e[j] == lo or k == n - 1):
                return False
    return True


def normalize(w: CyclicWord, check_essential: bool = True) -> CyclicWord:
    """The unique normal representative of an essential loop word, given as
    the lexicographically smallest of its triple shifts."""
    from . import freegroup

    if w.kind != "loop":
        raise ValueError("normalize expects a loop word")
    if check_essential and not freegroup.is_essential(w):
        raise NotEssential(f"({w}) winds a single puncture")

    e = list(w.entries)
    # stage 1: weak-normal (each rewrite drops one triple)
    while True:
        nxt = _weak_normal_step(e)
        if nxt is None:
            break
        e = nxt
        if len(e) < 3 or len(e) % 3:
            raise NotEssential("reduction escaped the triple grid")
    # stage 2: almost-normal; fix (a, 0, b) with a, b <= -1
    n = len(e)
    while True:
        hit = _find_cyclic(e, lambda i: e[i] == 0
                           and e[(i - 1) % n] <= -1 and e[(i + 1) % n] <= -1)
        if hit is None:
            break
        e[(hit - 1) % n] += 1
        e[hit] += 1
        e[(hit + 1) % n] += 1
    # stage 3: normal; fix (a, 1, b) with a >= 2 or b >= 2
    while True:
        hit = _find_cyclic(e, lambda i: e[i] == 1
                           and (e[(i - 1) % n] >= 2 or e[(i + 1) % n] >= 2))
        if hit is None:
            break
        e[(hit - 1) % n] -= 1
        e[hit] -= 1
        e[(hit + 1) % n] -= 1

    # The chain cannot touch the all-(-1) word (no 0, 1 or runs to rewrite);
    # it is equivalent to the all-2 word of the same length.
    if all(v == -1 for v in e):
        e = [2] * len(e)

    out = CyclicWord(tuple(e), "loop")
    ok, violations = is_normal(out, with_violations=True)
    if not ok:  # pragma: no cover - chain failure would be a logic error
        raise RuntimeError(f"normalization failed: {violations}")
    return canonical_shift(out)


def canonical_shift(w: CyclicWord) -> CyclicWord:
    """Lexicographically smallest among the tau triple shifts."""
    best = min(shift_entries(w.entries, 3 * k) for k in range(w.tau))
    return CyclicWord(best, w.kind)


def equal_up_to_shift(a: CyclicWord, b: CyclicWord) -> bool:
    if len(a) != len(b):
        return False
    return canonical_shift(a).entries == canonical_shift(b).entries


def period(w: CyclicWord) -> tuple[bool, CyclicWord, int]:
    """Smallest triple-shift period: (is_periodic, base word, repetitions)."""
    tau = w.tau
    for t in range(1, tau + 1):
        if tau % t:
            continue
        if shift_entries(w.entries, 3 * t) == w.entries:
            base = CyclicWord(w.entries[:3 * t], w.kind)
            return (tau // t >= 2), base, tau // t
    raise AssertionError("unreachable: tau divides tau")  # pragma: no cover
