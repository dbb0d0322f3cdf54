"""Canonical matrix factorizations of xyz and their geometric counterparts.

Builds the cyclic tridiagonal-with-corners factor phi(w', lam, 1), its scaled
partner psi~ and unit u, the mirror matrix of an immersed loop, sign-diagonal
matching between the two, the shift functor, unit-pivot reduction and the
rank-one theta catalogue.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import convert
from .ring import (
    LaurentLambda, NotAUnit, Poly, PolyMatrix, RatFunc, det,
    monomial_guarded, truncated_inverse, X, Y, Z, XYZ,
)
from .words import CyclicWord, LoopDatum, NotNormal, UnitMonomial, is_normal


class MatchInconsistent(RuntimeError):
    """Sign propagation between geometric and canonical matrices failed."""


class Unsupported(ValueError):
    """The requested construction is outside the implemented range."""


VAR_CYCLE = ("x", "y", "z")


def chi(j: int) -> str:
    """chi_j: the variable name x, y, z for j = 1, 2, 3 cyclically (1-based)."""
    return VAR_CYCLE[(j - 1) % 3]


def chi_power(j: int, exp: int) -> Poly:
    return monomial_guarded(chi(j), exp)


def _lam_poly(unit: UnitMonomial, invert: bool = False) -> Poly:
    u = unit.inverse() if invert else unit
    return Poly.const(LaurentLambda.lam_power(u.lam_exp, u.coeff))


@dataclass
class MatrixFactorization:
    """A pair (phi, psi) with phi*psi = psi*phi = scale * potential * I.

    When psi is the scaled partner psi~ of the canonical form, scale is the
    unit u; for exact pairs scale is 1.
    """
    phi: PolyMatrix
    psi: PolyMatrix
    potential: Poly
    scale: Poly
    truncated: bool = False

    def verify(self) -> bool:
        return verify_mf(self.phi, self.psi, self.potential, self.scale)


@dataclass(frozen=True)
class SignConjugation:
    left: tuple[int, ...]
    right: tuple[int, ...]

    def apply(self, m: PolyMatrix) -> PolyMatrix:
        out = []
        for i in range(m.rows):
            row = []
            for j in range(m.cols):
                e = m.entries[i][j]
                s = self.left[i] * self.right[j]
                row.append(e if s == 1 else -e)
            out.append(row)
        return PolyMatrix(out)


# ---------------------------------------------------------------------------
# canonical factor phi(w', lam, 1), partner psi~ and unit u
# ---------------------------------------------------------------------------

def canonical_phi(w_prime: CyclicWord, lam: UnitMonomial = UnitMonomial()) -> PolyMatrix:
    """The 3tau x 3tau canonical factor of xyz indexed by the loop word.

    Diagonal z, x, y, ...; superdiagonal -chi_k^(w'_k - 1); subdiagonal
    -chi_k^(-w'_k); lambda appears only on the two w'_1 corners.  Exponents
    are guarded (zero when negative).
    """
    if w_prime.kind != "loop":
        raise ValueError("canonical form is indexed by the converted loop word")
    n = len(w_prime.entries)
    m = PolyMatrix.zero(n, n)
    lam_p = _lam_poly(lam)
    lam_n = _lam_poly(lam, invert=True)
    for j in range(1, n + 1):
        wj = w_prime.at(j)
        m.entries[j - 1][j - 1] = Poly.var(chi(j - 1))
        up = -chi_power(j, wj - 1)   # row j-1, col j
        dn = -chi_power(j, -wj)      # row j, col j-1
        if j == 1:
            up = up * lam_p          # the -lam x^(l'_1 - 1) corner
            dn = dn * lam_n          # the -lam^-1 x^(-l'_1) corner
        m.entries[(j - 2) % n][j - 1] = up
        m.entries[j - 1][(j - 2) % n] = dn
    return m


def _cyclic_range(a: int, b: int, n: int) -> list[int]:
    """Indices a, a+1, ..., b cyclically in 1..n; empty when b = a - 1 (mod n)."""
    if (b - (a - 1)) % n == 0:
        return []
    out = [((a - 1) % n) + 1]
    while out[-1] != ((b - 1) % n) + 1:
        out.append((out[-1] % n) + 1)
    return out


def _cyclic_product(indices: list[int], exps: dict[int, int],
                    lam_factor: dict[int, Poly]) -> Poly:
    acc = Poly.one()
    for j in indices:
        e = exps[j]
        if e < 0:
            return Poly.zero()
        acc = acc * chi_power(j, e)
        if j in lam_factor:
            acc = acc * lam_factor[j]
    return acc


def _guarded_run(indices: list[int], base: dict[int, int], marks: list[int],
                 lam_factor: Poly) -> Poly:
    """prod over the run of chi_j^(base_j - 1 + mult_j), vanishing as soon as
    any base_j is negative.

    base_j is the guarded exponent of the underlying phi entry (w'_j - 1 on
    the superdiagonal side, -w'_j on the subdiagonal side); mult_j counts the
    run endpoints, so interior factors lose one power of chi_j and endpoints
    keep base_j (twice-marked single factors gain one).  This is the adjugate
    of phi divided by (xyz)^(tau-1), with the zero convention inherited from
    the phi entries themselves.
    """
    if any(base[j] < 0 for j in indices):
        return Poly.zero()
    mult: dict[int, int] = {}
    for mark in marks:
        mult[mark] = mult.get(mark, 0) + 1
    acc = Poly.one()
    for j in indices:
        e = base[j] - 1 + mult.get(j, 0)
        if e < 0:
            raise ValueError(
                "scaled partner has a negative interior exponent; "
                "the closed form only applies to normal loop words")
        acc = acc * chi_power(j, e)
        if j == 1:
            acc = acc * lam_factor
    return acc


def psi_tilde(w_prime: CyclicWord, lam: UnitMonomial = UnitMonomial()) -> PolyMatrix:
    """The scaled partner: phi * psi~ = psi~ * phi = u * xyz * I."""
    n = len(w_prime.entries)
    lam_p = _lam_poly(lam)
    lam_n = _lam_poly(lam, invert=True)
    m = PolyMatrix.zero(n, n)

    def norm(j):
        return ((j - 1) % n) + 1

    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a == b:
                m.entries[a - 1][b - 1] = Poly.var(chi(a)) * Poly.var(chi(a + 1))
                continue
            idx1 = _cyclic_range(a + 1, b, n)
            term1 = _guarded_run(idx1, {j: w_prime.at(j) - 1 for j in idx1},
                                 [norm(a + 1), norm(b)], lam_p)
            idx2 = _cyclic_range(b + 1, a, n)
            term2 = _guarded_run(idx2, {j: -w_prime.at(j) for j in idx2},
                                 [norm(b + 1), norm(a)], lam_n)
            m.entries[a - 1][b - 1] = term1 + term2
    return m


def unit_u(w_prime: CyclicWord, lam: UnitMonomial = UnitMonomial()) -> Poly:
    """u = 1 - lam * prod chi_j^(w'_j - 2) - lam^-1 * prod chi_j^(-w'_j - 1)."""
    n = len(w_prime.entries)
    first = _cyclic_product(list(range(1, n + 1)),
                            {j: w_prime.at(j) - 2 for j in range(1, n + 1)},
                            {1: _lam_poly(lam)})
    second = _cyclic_product(list(range(1, n + 1)),
                             {j: -w_prime.at(j) - 1 for j in range(1, n + 1)},
                             {1: _lam_poly(lam, invert=True)})
    return Poly.one() - first - second


def canonical_mf(w_prime: CyclicWord, lam: UnitMonomial = UnitMonomial()) -> MatrixFactorization:
    return MatrixFactorization(canonical_phi(w_prime, lam), psi_tilde(w_prime, lam),
                               XYZ, unit_u(w_prime, lam))


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def _entries_equal(a, b) -> bool:
    if isinstance(a, RatFunc) or isinstance(b, RatFunc):
        return RatFunc.coerce(a) == RatFunc.coerce(b)
    return a == b


def verify_mf(phi: PolyMatrix, psi: PolyMatrix, potential: Poly,
              scale: Poly | None = None) -> bool:
    """phi*psi = psi*phi = scale*potential*I, exactly (cross-multiplied for
    RatFunc entries)."""
    if not (phi.is_square() and psi.is_square() and phi.rows == psi.rows):
        raise ValueError("matrix factorization pair must be square of equal size")
    target = (scale if scale is not None else Poly.one()) * potential
    n = phi.rows
    for prod in (phi * psi, psi * phi):
        for i in range(n):
            for j in range(n):
                want = target if i == j else Poly.zero()
                if not _entries_equal(prod.entries[i][j], want):
                    return False
    return True


def det_check(w_prime: CyclicWord, lam: UnitMonomial = UnitMonomial()) -> bool:
    """det phi = x^tau y^tau z^tau u, and adj phi = (xyz)^(tau-1) psi~.

    The adjugate identity is certified through the two-sided product
    phi * psi~ = psi~ * phi = u*xyz*I together with det phi != 0: over an
    integral domain those force psi~ = adj(phi) / (xyz)^(tau-1).
    """
    tau = w_prime.tau
    phi = canonical_phi(w_prime, lam)
    u = unit_u(w_prime, lam)
    expected = (X ** tau) * (Y ** tau) * (Z ** tau) * u
    if det(phi) != expected:
        return False
    if u.is_zero():
        return False
    psi = psi_tilde(w_prime, lam)
    return verify_mf(phi, psi, XYZ, u)


# ---------------------------------------------------------------------------
# geometric mirror matrix and sign matching
# ---------------------------------------------------------------------------

def _neg_x_power(exp: int) -> Poly:
    """(-x)^exp with the guard convention."""
    if exp < 0:
        return Poly.zero()
    p = monomial_guarded("x", exp)
    return -p if exp % 2 else p


def geometric_matrix(l: LoopDatum) -> PolyMatrix:
    """The mirror matrix M_L of an immersed loop for a normal word.

    Rows are ordered s_1, t_1, u_1, ..., columns p_1, q_1, r_1, ...; the
    holonomy sits only on the two w'_1 corners.
    """
    w = l.word
    ok, violations = is_normal(w, with_violations=True)
    if not ok:
        raise NotNormal(f"geometric matrix needs a normal word: {violations}")
    if set(w.entries) == {2}:
        raise Unsupported("all-2 words need the perturbed degenerate model")
    tau = w.tau
    n = 3 * tau
    m = PolyMatrix.zero(n, n)
    lam_p = _lam_poly(l.holonomy)
    lam_n = _lam_poly(l.holonomy, invert=True)
    for i in range(1, tau + 1):
        li, mi, ni = w.at(3 * i - 2), w.at(3 * i - 1), w.at(3 * i)
        s, t, u = 3 * i - 3, 3 * i - 2, 3 * i - 1   # 0-based rows
        p, q, r = 3 * i - 3, 3 * i - 2, 3 * i - 1   # 0-based cols
        m.entries[s][p] = Z
        m.entries[t][p] = monomial_guarded("y", -mi)
        m.entries[s][q] = -monomial_guarded("y", mi - 1)
        m.entries[t][q] = X
        m.entries[u][q] = monomial_guarded("z", -ni)
        m.entries[t][r] = -monomial_guarded("z", ni - 1)
        m.entries[u][r] = Y
    for i in range(1, tau + 1):
        l_next = w.at(3 * i + 1)       # l'_{i+1}, cyclic
        u_row = 3 * i - 1
        p_next = (3 * i) % n
        r_col = 3 * i - 1
        s_next = (3 * i) % n
        up_entry = -_neg_x_power(l_next - 1)
        dn_entry = -_neg_x_power(-l_next)
        if i == tau:               # the holonomy corners carry w'_1
            up_entry = up_entry * lam_p
            dn_entry = dn_entry * lam_n
        m.entries[u_row][p_next] = up_entry
        m.entries[s_next][r_col] = dn_entry
    return m


def _sign_ratio(a: Poly, b: Poly):
    """+1 if a == b, -1 if a == -b, None otherwise (including zero/nonzero)."""
    if a.is_zero() and b.is_zero():
        return 0
    if a == b:
        return 1
    if a == -b:
        return -1
    return None


def match_geometric_to_canonical(l: LoopDatum) -> SignConjugation:
    """Find sign diagonals with left * M_L * right = phi(w', lam) entrywise.

    The holonomy is substituted by the conversion rule
    lam' = (-1)^(l_1+...+l_tau+tau) * lam before matching, and the signs are
    found by propagation along the cyclic band of nonzero entries.
    """
    band = convert.band_from_loop(l)
    sigma = convert.sign_exponent(band.word)
    lam = band.eigenvalue
    lam_prime = lam.negate() if sigma else lam
    geo = geometric_matrix(LoopDatum(l.word, lam_prime, l.multiplicity))
    can = canonical_phi(l.word, lam)
    n = geo.rows

    constraints: dict[tuple[int, int], int] = {}
    for i in range(n):
        for j in range(n):
            s = _sign_ratio(geo.entries[i][j], can.entries[i][j])
            if s is None:
                raise MatchInconsistent(
                    f"entries at ({i + 1},{j + 1}) differ beyond sign: "
                    f"{geo.entries[i][j]} vs {can.entries[i][j]}")
            if s:
                constraints[(i, j)] = s

    left = [0] * n
    right = [0] * n
    # propagate: left[i] * right[j] = s  =>  fixing one fixes the other
    for seed in range(n):
        if right[seed]:
            continue
        right[seed] = 1
        stack = [("col", seed)]
        while stack:
            kind, idx = stack.pop()
            if kind == "col":
                for (i, j), s in constraints.items():
                    if j != idx:
                        continue
                    want = s * right[j]
                    if left[i] == 0:
                        left[i] = want
                        stack.append(("row", i))
                    elif left[i] != want:
                        raise MatchInconsistent("sign propagation clash")
            else:
                for (i, j), s in constraints.items():
                    if i != idx:
                        continue
                    want = s * left[i]
                    if right[j] == 0:
                        right[j] = want
                        stack.append(("col", j))
                    elif right[j] != want:
                        raise MatchInconsistent("sign propagation clash")
    for i in range(n):
        if left[i] == 0:
            left[i] = 1
    conj = SignConjugation(tuple(left), tuple(right))
    if conj.apply(geo) != can:
        raise MatchInconsistent("post-hoc entrywise check failed")
    return conj


# ---------------------------------------------------------------------------
# shift functor and unit-pivot reduction
# ---------------------------------------------------------------------------

def shift_mf(m: MatrixFactorization) -> MatrixFactorization:
    """The shift functor: swap the two factors."""
    return MatrixFactorization(m.psi, m.phi, m.potential, m.scale, m.truncated)


def _cycle_to_last(n: int, i: int) -> list[int]:
    return [k for k in range(n) if k != i] + [i]


def unit_pivot_reduce(m: MatrixFactorization, pivot: tuple[int, int],
                      side: str = "phi", trunc: int = 12) -> MatrixFactorization:
    """Remove one row/column pair at an invertible pivot entry.

    pivot is 1-based (row, col) in the chosen factor.  The pivot factor
    becomes C - D u^-1 E^T; the complementary factor just drops the pivot
    row/column.  Exact when the pivot is constant in x, y, z (with RatFunc
    entries when the constant is not a lam-monomial); otherwise the inverse
    is a truncated power series to total degree `trunc` and the result is
    flagged truncated.
    """
    if side not in ("phi", "psi"):
        raise ValueError("side must be 'phi' or 'psi'")
    a, b = (m.phi, m.psi) if side == "phi" else (m.psi, m.phi)
    n = a.rows
    i, j = pivot[0] - 1, pivot[1] - 1
    rows = _cycle_to_last(n, i)
    cols = _cycle_to_last(n, j)
    a2 = a.permute(rows, cols)
    b2 = b.permute(cols, rows)
    u = a2.entries[n - 1][n - 1]

    truncated_flag = m.truncated
    if isinstance(u, RatFunc):
        if not u.constant_nonzero():
            raise NotAUnit(f"pivot {u} has no invertible constant term")
        u_inv = u.inverse()
    else:
        c0 = u.constant_coeff()
        if c0.is_zero():
            raise NotAUnit(f"pivot {u} has zero constant term")
        if u == Poly.const(c0):
            if c0.is_monomial():
                u_inv = Poly.const(c0.inverse_monomial())
            else:
                u_inv = RatFunc(Poly.one(), u)
        elif c0.is_monomial():
            u_inv = truncated_inverse(u, trunc)
            truncated_flag = True
        else:
            u_inv = RatFunc(Poly.one(), u)

    reduced = []
    for r in range(n - 1):
        row = []
        d_r = a2.entries[r][n - 1]
        for c in range(n - 1):
            e_c = a2.entries[n - 1][c]
            corr = d_r * u_inv * e_c
            row.append(a2.entries[r][c] - corr)
        reduced.append(row)
    a_red = PolyMatrix(reduced)
    b_red = b2.submatrix(range(n - 1), range(n - 1))
    if side == "phi":
        return MatrixFactorization(a_red, b_red, m.potential, m.scale, truncated_flag)
    return MatrixFactorization(b_red, a_red, m.potential, m.scale, truncated_flag)


# ---------------------------------------------------------------------------
# rank-one catalogue and the degenerate / reduced goldens
# ---------------------------------------------------------------------------

def theta_catalogue(index: int, params: tuple[int, ...],
                    lam: UnitMonomial = UnitMonomial(),
                    variables: tuple[str, str, str] = ("x", "y", "z")) -> PolyMatrix:
    """The seven rank-one presentation matrices theta_1..theta_7.

    params is (p, q) for indices 1..3 and (m, n, l) for 4..7; `variables`
    fixes the bijection (u, v, w) -> three distinct ring variables.
    """
    if sorted(variables) != ["x", "y", "z"]:
        raise ValueError("variables must be a permutation of x, y, z")
    u, v, w = (Poly.var(t) for t in variables)
    lp = _lam_poly(lam)
    if index in (1, 2, 3):
        p, q = params
        if p < 1 or q < 1:
            raise ValueError("theta_1..3 need p, q >= 1")
        uv, vw = u, v * w
        t1 = PolyMatrix([[u, Poly.zero()], [v**p + lp * w**q, vw]])
        if index == 1:
            return t1
        if index == 3:
            return t1.transpose()
        return PolyMatrix([[lp * u + v**p * w**q, w**(q + 1)],
                           [v**(p + 1), vw]])
    if index in (4, 5, 6, 7):
        mm, nn, ll = params
        if min(mm, nn, ll) < 1:
            raise ValueError("theta_4..7 need m, n, l >= 1")
        t4 = PolyMatrix([[u, w**ll, Poly.zero()],
                         [Poly.zero(), v, u**mm],
                         [lp * v**nn, Poly.zero(), w]])
        if index == 4:
            return t4
        if index == 6:
            return t4.transpose()
        t5 = PolyMatrix([[u, w**ll, lp * v**nn],
                         [Poly.zero(), v, u**mm],
                         [Poly.zero(), Poly.zero(), w]])
        if index == 5:
            return t5
        return t5.transpose()
    raise ValueError(f"theta index must be 1..7, got {index}")


def degenerate_222(lam_prime: UnitMonomial, tau: int = 1) -> MatrixFactorization:
    """The perturbed 4x4 factorization of the degenerate loop (2, 2, 2)."""
    if tau != 1:
        raise Unsupported("the perturbed model is only written out for tau = 1")
    lp = _lam_poly(lam_prime)
    zero = Poly.zero()
    phi = PolyMatrix([
        [X * Z, zero, zero, zero],
        [Z, -Y, zero, zero],
        [zero, X, -Z, zero],
        [lp * X, zero, Y, X * Y],
    ])
    psi = PolyMatrix([
        [Y, zero, zero, zero],
        [Z, -X * Z, zero, zero],
        [X, -(X * X), -(X * Y), zero],
        [-Poly.one() - lp, X, Y, Z],
    ])
    return MatrixFactorization(phi, psi, XYZ, Poly.one())


def removing_bigon_matrix(l_prime: int, m_prime: int,
                          lam_prime: UnitMonomial) -> PolyMatrix:
    """The 2x2 factor of the bigon-removed loop for normal (l', m', 1).

    Derived by the unit-pivot reduction of the mirror matrix at the -z^0
    entry; the printed display differs by two sign/holonomy typos (it fails
    det = xyz), so the reduction is authoritative here.
    """
    if not is_normal(CyclicWord((l_prime, m_prime, 1), "loop")):
        raise NotNormal(f"({l_prime},{m_prime},1) is not normal")
    sign = 1 if (l_prime + 1) % 2 == 0 else -1
    lam_inv = _lam_poly(lam_prime, invert=True).scale(Fraction(sign))
    e11 = Z + lam_inv * monomial_guarded("x", -l_prime) * monomial_guarded("y", -m_prime)
    e12 = lam_inv * monomial_guarded("x", 1 - l_prime)
    e21 = monomial_guarded("y", 1 - m_prime)
    return PolyMatrix([[e11, e12], [e21, X * Y]])


def nonnormal_example_matrix(lam: UnitMonomial = UnitMonomial()) -> PolyMatrix:
    """The mirror matrix of the non-normal loop word with entries (-2, 0, -3)."""
    lp = _lam_poly(lam)
    zero = Poly.zero()
    return PolyMatrix([
        [Z - lp * X * X * Y, zero, lp * X**3],
        [Y * Y, X, zero],
        [zero, Poly.one(), Y],
    ])
