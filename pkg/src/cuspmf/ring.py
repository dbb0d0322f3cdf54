"""Exact arithmetic for Q[lam,lam^-1][x,y,z], rational-function pairs and matrices.

Everything in here is immutable after construction and purely functional:
no floats, no in-place mutation of published objects.  Coefficients live in
the Laurent ring Q[lam,lam^-1] where ``lam`` is a formal invertible variable
(used for eigenvalues/holonomies), so identities can be checked for generic
values symbolically.
"""

from __future__ import annotations

from fractions import Fraction


class NotAUnit(ValueError):
    """Raised when an inversion is requested for a non-invertible element."""


class NotSquare(ValueError):
    """Raised by determinant/adjugate on non-square matrices."""


# ---------------------------------------------------------------------------
# Laurent polynomials in the single variable lam over Q
# ---------------------------------------------------------------------------

class LaurentLambda:
    """A Laurent polynomial in lam with exact rational coefficients.

    Stored as a dict mapping lam-exponent (int, may be negative) to a nonzero
    Fraction.  The zero element has an empty dict.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        if terms:
            self.terms = {e: c for e, c in terms.items() if c != 0}
        else:
            self.terms = {}

    @staticmethod
    def from_rational(c) -> LaurentLambda:
        c = Fraction(c)
        return LaurentLambda({0: c}) if c else LaurentLambda()

    @staticmethod
    def lam_power(e: int, c=1) -> LaurentLambda:
        c = Fraction(c)
        return LaurentLambda({e: c}) if c else LaurentLambda()

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {0: Fraction(1)}

    def is_monomial(self) -> bool:
        """True iff a single lam-power with nonzero coefficient (a unit)."""
        return len(self.terms) == 1

    def constant(self) -> Fraction:
        """Coefficient of lam^0."""
        return self.terms.get(0, Fraction(0))

    def inverse_monomial(self) -> LaurentLambda:
        if not self.is_monomial():
            raise NotAUnit(f"not a unit in Q[lam,lam^-1]: {self}")
        ((e, c),) = self.terms.items()
        return LaurentLambda({-e: Fraction(1) / c})

    def __add__(self, other: LaurentLambda) -> LaurentLambda:
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _F0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        res = LaurentLambda.__new__(LaurentLambda)
        res.terms = out
        return res

    def __neg__(self) -> LaurentLambda:
        res = LaurentLambda.__new__(LaurentLambda)
        res.terms = {e: -c for e, c in self.terms.items()}
        return res

    def __sub__(self, other: LaurentLambda) -> LaurentLambda:
        return self + (-other)

    def __mul__(self, other: LaurentLambda) -> LaurentLambda:
        out: dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                s = out.get(e, _F0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        res = LaurentLambda.__new__(LaurentLambda)
        res.terms = out
        return res

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentLambda):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def evaluate(self, value: Fraction) -> Fraction:
        value = Fraction(value)
        if value == 0:
            raise ZeroDivisionError("lam must be invertible")
        return sum((c * value**e for e, c in self.terms.items()), Fraction(0))

    def divexact(self, other: LaurentLambda) -> LaurentLambda:
        """Exact division in Q[lam,lam^-1]; raises NotAUnit if not exact."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero in Q[lam,lam^-1]")
        if self.is_zero():
            return LaurentLambda()
        # Shift both to ordinary polynomials and long-divide over Q.
        lo_s = min(self.terms)
        lo_o = min(other.terms)
        deg_b = max(other.terms) - lo_o
        b = {e - lo_o: c for e, c in other.terms.items()}
        lead_b = b[deg_b]
        a = {e - lo_s: c for e, c in self.terms.items()}
        q: dict[int, Fraction] = {}
        while a:
            deg_a = max(a)
            if deg_a < deg_b:
                raise NotAUnit(f"inexact division in Q[lam,lam^-1]: {self} / {other}")
            qe = deg_a - deg_b
            qc = a[deg_a] / lead_b
            q[qe] = qc
            for e, c in b.items():
                s = a.get(e + qe, _F0) - qc * c
                if s:
                    a[e + qe] = s
                else:
                    a.pop(e + qe, None)
        return LaurentLambda({e + lo_s - lo_o: c for e, c in q.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if e == 0:
                parts.append(str(c))
            elif e == 1:
                parts.append(f"{c}*λ" if abs(c) != 1 else ("λ" if c > 0 else "-λ"))
            else:
                base = f"λ^{e}"
                parts.append(f"{c}*{base}" if abs(c) != 1 else (base if c > 0 else f"-{base}"))
        out = parts[0]
        for p in parts[1:]:
            out += f" + {p}" if not p.startswith("-") else f" - {p[1:]}"
        return out

    __repr__ = __str__


_F0 = Fraction(0)
_F1 = Fraction(1)

LL_ZERO = LaurentLambda()
LL_ONE = LaurentLambda({0: _F1})
LL_LAM = LaurentLambda({1: _F1})
LL_LAM_INV = LaurentLambda({-1: _F1})


def _coerce_ll(c) -> LaurentLambda:
    if isinstance(c, LaurentLambda):
        return c
    return LaurentLambda.from_rational(c)


# ---------------------------------------------------------------------------
# Sparse polynomials in x, y, z over Q[lam,lam^-1]
# ---------------------------------------------------------------------------

VARS = ("x", "y", "z")
_VAR_INDEX = {"x": 0, "y": 1, "z": 2}


class Poly:
    """Sparse polynomial in x, y, z with LaurentLambda coefficients.

    terms: dict mapping exponent triples (ex, ey, ez) of nonnegative ints to
    nonzero LaurentLambda coefficients.  Equality is literal equality of the
    term maps (the representation is canonical).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, int, int], LaurentLambda] | None = None):
        if terms:
            self.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        else:
            self.terms = {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> Poly:
        return Poly()

    @staticmethod
    def one() -> Poly:
        return Poly({(0, 0, 0): LL_ONE})

    @staticmethod
    def const(c) -> Poly:
        c = _coerce_ll(c)
        return Poly({(0, 0, 0): c})

    @staticmethod
    def lam(e: int = 1, c=1) -> Poly:
        return Poly({(0, 0, 0): LaurentLambda.lam_power(e, c)})

    @staticmethod
    def monomial(ex: int, ey: int, ez: int, coeff=1) -> Poly:
        if ex < 0 or ey < 0 or ez < 0:
            raise ValueError("negative exponent in monomial; use monomial_guarded")
        return Poly({(ex, ey, ez): _coerce_ll(coeff)})

    @staticmethod
    def var(name: str, exp: int = 1) -> Poly:
        m = [0, 0, 0]
        m[_VAR_INDEX[name]] = exp
        return Poly.monomial(*m)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0, 0, 0): LL_ONE}

    def constant_coeff(self) -> LaurentLambda:
        return self.terms.get((0, 0, 0), LL_ZERO)

    def total_degree(self) -> int:
        """Max total degree in x, y, z; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: Poly) -> Poly:
        if not isinstance(other, Poly):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                s = out[m] + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        res = Poly.__new__(Poly)
        res.terms = out
        return res

    def __neg__(self) -> Poly:
        res = Poly.__new__(Poly)
        res.terms = {m: -c for m, c in self.terms.items()}
        return res

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly()
        out: dict[tuple[int, int, int], LaurentLambda] = {}
        for (a1, a2, a3), c1 in self.terms.items():
            for (b1, b2, b3), c2 in other.terms.items():
                m = (a1 + b1, a2 + b2, a3 + b3)
                p = c1 * c2
                if m in out:
                    s = out[m] + p
                    if s.is_zero():
                        del out[m]
                    else:
                        out[m] = s
                else:
                    out[m] = p
        res = Poly.__new__(Poly)
        res.terms = out
        return res

    def scale(self, c) -> Poly:
        c = _coerce_ll(c)
        if c.is_zero():
            return Poly()
        res = Poly.__new__(Poly)
        res.terms = {m: k * c for m, k in self.terms.items()}
        return res

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative power of a Poly")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFunc):
            return NotImplemented  # let RatFunc cross-multiply
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((m, c) for m, c in self.terms.items()))

    # -- ring-specific operations ------------------------------------------

    def substitute_z_negate(self) -> Poly:
        """Replace z by -z: each coefficient picks up (-1)^ez."""
        out = {}
        for m, c in self.terms.items():
            out[m] = -c if m[2] % 2 else c
        return Poly(out)

    def eval_lambda(self, value) -> Poly:
        """Substitute a rational value for lam."""
        value = Fraction(value)
        out: dict[tuple[int, int, int], LaurentLambda] = {}
        for m, c in self.terms.items():
            v = c.evaluate(value)
            if v:
                out[m] = LaurentLambda({0: v})
        return Poly(out)

    def truncate(self, degree_bound: int) -> Poly:
        """Drop monomials of total degree above the bound."""
        return Poly({m: c for m, c in self.terms.items() if sum(m) <= degree_bound})

    def divexact_var(self, name: str, exp: int = 1) -> Poly:
        """Exact division by a variable power; raises if any term fails."""
        i = _VAR_INDEX[name]
        out = {}
        for m, c in self.terms.items():
            if m[i] < exp:
                raise ValueError(f"{self} not divisible by {name}^{exp}")
            mm = list(m)
            mm[i] -= exp
            out[tuple(mm)] = c
        return Poly(out)

    def divisible_by_var(self, name: str, exp: int = 1) -> bool:
        i = _VAR_INDEX[name]
        return all(m[i] >= exp for m in self.terms)

    def leading(self) -> tuple[tuple[int, int, int], LaurentLambda]:
        """Leading term under lex order on (ex, ey, ez)."""
        m = max(self.terms)
        return m, self.terms[m]

    def divexact(self, other: Poly) -> Poly:
        """Exact division in the full ring; raises ValueError if not exact."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Poly()
        lm, lc = other.leading()
        rem = self
        q: dict[tuple[int, int, int], LaurentLambda] = {}
        while not rem.is_zero():
            rm, rc = rem.leading()
            qm = (rm[0] - lm[0], rm[1] - lm[1], rm[2] - lm[2])
            if min(qm) < 0:
                raise ValueError(f"inexact polynomial division: {self} / {other}")
            qc = rc.divexact(lc)
            q[qm] = qc
            rem = rem - Poly({qm: qc}) * other
        return Poly(q)

    # -- serialization / display --------------------------------------------

    def to_json(self) -> list[dict]:
        out = []
        for m in sorted(self.terms):
            for e, c in sorted(self.terms[m].terms.items()):
                out.append({"x": m[0], "y": m[1], "z": m[2], "lam": e,
                            "num": c.numerator, "den": c.denominator})
        return out

    @staticmethod
    def from_json(data: list[dict]) -> Poly:
        p = Poly()
        for t in data:
            coeff = LaurentLambda.lam_power(t.get("lam", 0),
                                            Fraction(t["num"], t.get("den", 1)))
            p = p + Poly({(t["x"], t["y"], t["z"]): coeff})
        return p

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (sum(m), m), reverse=True):
            c = self.terms[m]
            mono = "".join(
                f"{v}" if e == 1 else f"{v}^{e}"
                for v, e in zip(VARS, m) if e
            )
            if not mono:
                parts.append(f"({c})" if len(c.terms) > 1 else str(c))
            elif c.is_one():
                parts.append(mono)
            elif c == -LL_ONE:
                parts.append(f"-{mono}")
            elif c.is_monomial():
                parts.append(f"{c}*{mono}")
            else:
                parts.append(f"({c})*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    __repr__ = __str__


P_ZERO = Poly.zero()
P_ONE = Poly.one()
X = Poly.var("x")
Y = Poly.var("y")
Z = Poly.var("z")
XYZ = X * Y * Z


def monomial_guarded(var: str, exp: int) -> Poly:
    """var^exp, with negative exponents read as the zero polynomial."""
    if exp < 0:
        return Poly.zero()
    return Poly.var(var, exp)


def truncated_inverse(p: Poly, degree_bound: int) -> Poly:
    """Inverse of p in the power-series ring, truncated at the total degree bound.

    Requires the constant term to be a unit of Q[lam,lam^-1] (a nonzero
    lam-monomial); raises NotAUnit otherwise.
    """
    c0 = p.constant_coeff()
    if c0.is_zero():
        raise NotAUnit("zero constant term has no power-series inverse")
    c0_inv = c0.inverse_monomial()
    # p = c0 (1 - r) with r of positive order; invert by geometric series.
    r = Poly.const(LL_ONE) - p.scale(c0_inv)
    acc = Poly.one()
    power = Poly.one()
    for _ in range(degree_bound):
        power = (power * r).truncate(degree_bound)
        if power.is_zero():
            break
        acc = acc + power
    return acc.scale(c0_inv).truncate(degree_bound)


# ---------------------------------------------------------------------------
# Rational functions (never normalized; equality via cross multiplication)
# ---------------------------------------------------------------------------

class RatFunc:
    """A fraction num/den of Poly values, den nonzero.  No GCD reduction."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.one()
        if den.is_zero():
            raise ZeroDivisionError("RatFunc with zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def coerce(v) -> RatFunc:
        if isinstance(v, RatFunc):
            return v
        if isinstance(v, Poly):
            return RatFunc(v)
        return RatFunc(Poly.const(v))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other) -> RatFunc:
        other = RatFunc.coerce(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> RatFunc:
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other) -> RatFunc:
        return RatFunc.coerce(other) + (-self)

    def __mul__(self, other) -> RatFunc:
        other = RatFunc.coerce(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RatFunc:
        other = RatFunc.coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero RatFunc")
        return RatFunc(self.num * other.den, self.den * other.num)

    def inverse(self) -> RatFunc:
        if self.num.is_zero():
            raise NotAUnit("zero has no inverse")
        return RatFunc(self.den, self.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            other = RatFunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):  # pragma: no cover - not used as dict key in anger
        return hash((self.num, self.den))

    def constant_nonzero(self) -> bool:
        """True iff the fraction has a nonzero constant term (num(0)/den(0) != 0)."""
        return (not self.num.constant_coeff().is_zero()
                and not self.den.constant_coeff().is_zero())

    def as_poly(self) -> Poly:
        """Exact conversion to Poly; raises ValueError if den does not divide num."""
        return self.num.divexact(self.den)

    def substitute_z_negate(self) -> RatFunc:
        return RatFunc(self.num.substitute_z_negate(), self.den.substitute_z_negate())

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Dense matrices over Poly (or RatFunc, element type is not enforced)
# ---------------------------------------------------------------------------

class PolyMatrix:
    """A rows x cols matrix stored as a list of row lists."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: list[list]):
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else 0
        for row in entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix rows")
        self.entries = [list(row) for row in entries]

    @staticmethod
    def zero(rows: int, cols: int) -> PolyMatrix:
        return PolyMatrix([[Poly.zero() for _ in range(cols)] for _ in range(rows)])

    @staticmethod
    def identity(n: int, scalar: Poly | None = None) -> PolyMatrix:
        s = scalar if scalar is not None else Poly.one()
        m = PolyMatrix.zero(n, n)
        for i in range(n):
            m.entries[i][i] = s
        return m

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(self.entries[i][j] == other.entries[i][j]
                   for i in range(self.rows) for j in range(self.cols))

    def __hash__(self):  # pragma: no cover
        raise TypeError("PolyMatrix is unhashable")

    def __mul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = None
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a.is_zero():
                        continue
                    b = other.entries[k][j]
                    if b.is_zero():
                        continue
                    term = a * b
                    acc = term if acc is None else acc + term
                if acc is None:
                    acc = _zero_like(self.entries[i][0])
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch in matrix sum")
        return PolyMatrix([[self.entries[i][j] + other.entries[i][j]
                            for j in range(self.cols)] for i in range(self.rows)])

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch in matrix difference")
        return PolyMatrix([[self.entries[i][j] - other.entries[i][j]
                            for j in range(self.cols)] for i in range(self.rows)])

    def __neg__(self) -> PolyMatrix:
        return PolyMatrix([[-e for e in row] for row in self.entries])

    def scale(self, s) -> PolyMatrix:
        if isinstance(s, (LaurentLambda, Fraction, int)):
            return PolyMatrix([[e.scale(s) if isinstance(e, Poly) else e * Poly.const(s)
                                for e in row] for row in self.entries])
        return PolyMatrix([[e * s for e in row] for row in self.entries])

    def map_entries(self, f) -> PolyMatrix:
        return PolyMatrix([[f(e) for e in row] for row in self.entries])

    def transpose(self) -> PolyMatrix:
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)]
                           for j in range(self.cols)])

    def submatrix(self, keep_rows, keep_cols) -> PolyMatrix:
        return PolyMatrix([[self.entries[i][j] for j in keep_cols] for i in keep_rows])

    def permute(self, row_order, col_order) -> PolyMatrix:
        """Reindex: result[i][j] = self[row_order[i]][col_order[j]]."""
        return PolyMatrix([[self.entries[r][c] for c in col_order] for r in row_order])

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [e.to_json() for row in self.entries for e in row]}

    @staticmethod
    def from_json(data: dict) -> PolyMatrix:
        rows, cols = data["rows"], data["cols"]
        flat = [Poly.from_json(e) for e in data["entries"]]
        return PolyMatrix([flat[i * cols:(i + 1) * cols] for i in range(rows)])

    def pretty(self) -> str:
        cells = [[str(e) for e in row] for row in self.entries]
        widths = [max(len(cells[i][j]) for i in range(self.rows))
                  for j in range(self.cols)]
        lines = []
        for row in cells:
            lines.append("[ " + "  ".join(c.rjust(w) for c, w in zip(row, widths)) + " ]")
        return "\n".join(lines)

    def __str__(self):
        return self.pretty()

    __repr__ = __str__


def _zero_like(sample):
    if isinstance(sample, RatFunc):
        return RatFunc(Poly.zero())
    return Poly.zero()


def det(m: PolyMatrix) -> Poly:
    """Exact determinant: cofactor expansion below dimension 5, Bareiss above."""
    if not m.is_square():
        raise NotSquare("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return Poly.one()
    if n < 5:
        return _det_cofactor(m.entries)
    return _det_bareiss(m)


def _det_cofactor(rows: list[list[Poly]]) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = Poly.zero()
    for i in range(n):
        a = rows[i][0]
        if a.is_zero():
            continue
        minor = [[rows[r][c] for c in range(1, n)] for r in range(n) if r != i]
        term = a * _det_cofactor(minor)
        acc = acc + term if i % 2 == 0 else acc - term
    return acc


def _det_bareiss(m: PolyMatrix) -> Poly:
    n = m.rows
    a = [row[:] for row in m.entries]
    sign = 1
    prev = Poly.one()
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Poly.zero()
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = pivot * a[i][j] - aik * a[k][j]
                a[i][j] = num.divexact(prev)
            a[i][k] = Poly.zero()
        prev = pivot
    d = a[n - 1][n - 1]
    return d if sign == 1 else -d


def adjugate(m: PolyMatrix) -> PolyMatrix:
    """Classical adjugate via cofactors; satisfies M*adj(M) = det(M)*I exactly."""
    if not m.is_square():
        raise NotSquare("adjugate of a non-square matrix")
    n = m.rows
    if n == 1:
        return PolyMatrix([[Poly.one()]])
    out = PolyMatrix.zero(n, n)
    for i in range(n):
        for j in range(n):
            minor = [[m.entries[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            cof = _det_cofactor(minor)
            out.entries[j][i] = cof if (i + j) % 2 == 0 else -cof
    return out
