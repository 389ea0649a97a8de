"""Exact rational matrices: ranks, signatures, and affine normal forms.

Matrices are immutable tuples of Fraction rows.  Ranks use fraction-free
integer elimination (Bareiss) after clearing row denominators; signatures
of symmetric matrices use congruence diagonalization, handling an
all-zero trailing diagonal with a hyperbolic 2 x 2 pivot that contributes
one positive and one negative inertia unit.  No floating point anywhere.

The module also hosts matrices whose entries are affine polynomials in
x1..xD (AffineMatrixPoly) and the two normal forms used to turn a
determinantal representation det(Q(x)) = p(x) into a linear matrix plus
a fixed constant part: at a singular point the constant part becomes a
0/1 diagonal with the ones trailing, at a nonsingular point it becomes
the identity with a scalar factor in front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from birank.polyring import (
    Point,
    Polynomial,
    as_fraction,
    fraction_from_json,
    fraction_to_json,
    point,
    shift,
)


class ExactMatrix:
    __slots__ = ("entries",)

    def __init__(self, rows):
        cleaned = tuple(tuple(as_fraction(v) for v in row) for row in rows)
        if cleaned and any(len(row) != len(cleaned[0]) for row in cleaned):
            raise ValueError("ragged rows")
        object.__setattr__(self, "entries", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values) -> "ExactMatrix":
        values = [as_fraction(v) for v in values]
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in row) for row in self.entries)
        return f"ExactMatrix({self.rows}x{self.cols}: {body})"

    def __add__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        self._check_shape(other)
        return ExactMatrix([
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)
        ])

    def __sub__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        self._check_shape(other)
        return ExactMatrix([
            [a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)
        ])

    def __neg__(self):
        return ExactMatrix([[-v for v in row] for row in self.entries])

    def scale(self, factor) -> "ExactMatrix":
        factor = as_fraction(factor)
        return ExactMatrix([[factor * v for v in row] for row in self.entries])

    def __matmul__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = list(zip(*other.entries)) if other.entries else []
        return ExactMatrix([
            [sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols]
            for row in self.entries
        ])

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self.entries)) if self.entries else [])

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self.entries == self.transpose().entries

    def is_square(self) -> bool:
        return self.rows == self.cols

    def trace(self) -> Fraction:
        if not self.is_square():
            raise ValueError("trace needs a square matrix")
        return sum((self.entries[i][i] for i in range(self.rows)), Fraction(0))

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix([[self.entries[i][j] for j in col_idx] for i in row_idx])

    def to_lists(self) -> list:
        return [list(row) for row in self.entries]

    def _check_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product, blocks a[i][j] * b."""
    rows = []
    for ra in a.entries:
        for rb in b.entries:
            rows.append([va * vb for va in ra for vb in rb])
    return ExactMatrix(rows)


def trailing_ones_matrix(n: int, r: int) -> ExactMatrix:
    """Diagonal n x n matrix with ones in the last r positions."""
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    return ExactMatrix.diagonal([0] * (n - r) + [1] * r)


def _integer_rows(m: ExactMatrix) -> list:
    # Clearing each row's denominators preserves rank.
    out = []
    for row in m.entries:
        scale = math.lcm(*(v.denominator for v in row)) if row else 1
        out.append([int(v * scale) for v in row])
    return out


def rank_exact(m: ExactMatrix) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination."""
    rows = _integer_rows(m)
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot_row = next((i for i in range(rank, nrows) if rows[i][col]), None)
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        pivot = rows[rank][col]
        for i in range(rank + 1, nrows):
            factor = rows[i][col]
            for j in range(col + 1, ncols):
                rows[i][j] = (rows[i][j] * pivot - factor * rows[rank][j]) // prev
            rows[i][col] = 0
        prev = pivot
        rank += 1
        if rank == nrows:
            break
    return rank


def det_exact(m: ExactMatrix) -> Fraction:
    if not m.is_square():
        raise ValueError("determinant needs a square matrix")
    n = m.rows
    work = [list(row) for row in m.entries]
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((i for i in range(col, n) if work[i][col]), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            det = -det
        pivot = work[col][col]
        det *= pivot
        for i in range(col + 1, n):
            factor = work[i][col] / pivot
            if factor:
                for j in range(col, n):
                    work[i][j] -= factor * work[col][j]
    return det


def inverse_exact(m: ExactMatrix) -> ExactMatrix:
    if not m.is_square():
        raise ValueError("inverse needs a square matrix")
    n = m.rows
    work = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m.entries)]
    for col in range(n):
        pivot_row = next((i for i in range(col, n) if work[i][col]), None)
        if pivot_row is None:
            raise ValueError("matrix is singular")
        work[col], work[pivot_row] = work[pivot_row], work[col]
        pivot = work[col][col]
        work[col] = [v / pivot for v in work[col]]
        for i in range(n):
            if i != col and work[i][col]:
                factor = work[i][col]
                work[i] = [a - factor * b for a, b in zip(work[i], work[col])]
    return ExactMatrix([row[n:] for row in work])


class Signature(NamedTuple):
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def rank(self) -> int:
        return self.n_plus + self.n_minus


def signature_exact(m: ExactMatrix) -> Signature:
    """Inertia (n+, n-, n0) of a symmetric rational matrix.

    Congruence diagonalization: diagonal pivots eliminate symmetrically; a
    zero diagonal is first repaired by a symmetric swap with a later nonzero
    diagonal entry, and if the whole trailing diagonal vanishes a nonzero
    off-diagonal entry is pivoted as a hyperbolic 2 x 2 block, which has
    inertia (1, 1, 0).  Sylvester's law makes the count congruence-invariant.
    """
    if not m.is_symmetric():
        raise ValueError("signature needs a symmetric matrix")
    n = m.rows
    w = [list(row) for row in m.entries]
    n_plus = n_minus = 0

    def swap(a, b):
        w[a], w[b] = w[b], w[a]
        for row in w:
            row[a], row[b] = row[b], row[a]

    p = 0
    while p < n:
        if not w[p][p]:
            later = next((q for q in range(p + 1, n) if w[q][q]), None)
            if later is not None:
                swap(p, later)
        if w[p][p]:
            pivot = w[p][p]
            n_plus, n_minus = (n_plus + 1, n_minus) if pivot > 0 else (n_plus, n_minus + 1)
            for i in range(p + 1, n):
                factor = w[i][p] / pivot
                if factor:
                    for j in range(p, n):
                        w[i][j] -= factor * w[p][j]
            for i in range(p + 1, n):
                factor = w[p][i] / pivot
                if factor:
                    for j in range(p, n):
                        w[j][i] -= factor * w[j][p]
            p += 1
            continue
        # Entire trailing diagonal is zero here.
        pair = next(
            ((i, j) for i in range(p, n) for j in range(i + 1, n) if w[i][j]),
            None,
        )
        if pair is None:
            break
        i0, j0 = pair
        if i0 != p:
            swap(p, i0)
        if j0 != p + 1:
            swap(p + 1, j0)
        b = w[p][p + 1]
        n_plus += 1
        n_minus += 1
        for i in range(p + 2, n):
            c1 = w[i][p + 1] / b
            c2 = w[i][p] / b
            if c1 or c2:
                for j in range(p, n):
                    w[i][j] -= c1 * w[p][j] + c2 * w[p + 1][j]
        for i in range(p + 2, n):
            c1 = w[p + 1][i] / b
            c2 = w[p][i] / b
            if c1 or c2:
                for j in range(p, n):
                    w[j][i] -= c1 * w[j][p] + c2 * w[j][p + 1]
        p += 2
    return Signature(n_plus, n_minus, n - n_plus - n_minus)


def signature_lower_bound(q: ExactMatrix) -> int:
    """max(n+, n-) of q + q^T, a rank lower bound for every matrix with the
    same symmetric part."""
    if not q.is_square():
        raise ValueError("needs a square matrix")
    sig = signature_exact(q + q.transpose())
    return max(sig.n_plus, sig.n_minus)


def solve_linear(rows, rhs):
    """Solve rows * x = rhs over the rationals.

    Returns (particular, nullspace_basis) with free variables set to zero,
    or None when inconsistent.  Dense Gauss-Jordan.
    """
    m = len(rows)
    if m != len(rhs):
        raise ValueError("right-hand side length mismatch")
    ncols = len(rows[0]) if m else 0
    work = [[as_fraction(v) for v in row] + [as_fraction(rhs[i])] for i, row in enumerate(rows)]
    pivots = []
    r = 0
    for col in range(ncols):
        pivot_row = next((i for i in range(r, m) if work[i][col]), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        pivot = work[r][col]
        work[r] = [v / pivot for v in work[r]]
        for i in range(m):
            if i != r and work[i][col]:
                factor = work[i][col]
                work[i] = [a - factor * b for a, b in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if work[i][ncols]:
            return None
    particular = [Fraction(0)] * ncols
    for row_idx, col in enumerate(pivots):
        particular[col] = work[row_idx][ncols]
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for row_idx, col in enumerate(pivots):
            vec[col] = -work[row_idx][free]
        basis.append(vec)
    return particular, basis


# ---------------------------------------------------------------------------
# Matrices of affine polynomials and determinantal normal forms.


class AffineMatrixPoly:
    """Square matrix whose entries are affine in x1..xD.

    Stored as a constant matrix plus one coefficient matrix per variable:
    M(x) = const + sum_l coeffs[l] * x_{l+1}.
    """

    __slots__ = ("n", "num_vars", "const", "coeffs")

    def __init__(self, const: ExactMatrix, coeffs):
        coeffs = tuple(coeffs)
        if not const.is_square():
            raise ValueError("constant part must be square")
        for c in coeffs:
            if c.rows != const.rows or c.cols != const.cols:
                raise ValueError("coefficient shape mismatch")
        object.__setattr__(self, "n", const.rows)
        object.__setattr__(self, "num_vars", len(coeffs))
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("AffineMatrixPoly is immutable")

    @classmethod
    def from_entry_polys(cls, grid) -> "AffineMatrixPoly":
        n = len(grid)
        if any(len(row) != n for row in grid):
            raise ValueError("grid must be square")
        num_vars = grid[0][0].num_vars if n else 0
        zero_exps = (0,) * num_vars
        const = [[Fraction(0)] * n for _ in range(n)]
        coeffs = [[[Fraction(0)] * n for _ in range(n)] for _ in range(num_vars)]
        for i, row in enumerate(grid):
            for j, entry in enumerate(row):
                if entry.num_vars != num_vars:
                    raise ValueError("mixed variable counts in grid")
                if entry.degree() > 1:
                    raise ValueError(f"entry ({i},{j}) is not affine")
                for exps, coeff in entry.terms.items():
                    if exps == zero_exps:
                        const[i][j] = coeff
                    else:
                        coeffs[exps.index(1)][i][j] = coeff
        return cls(ExactMatrix(const), [ExactMatrix(c) for c in coeffs])

    def entry_poly(self, i: int, j: int) -> Polynomial:
        terms = {}
        c = self.const[i, j]
        if c:
            terms[(0,) * self.num_vars] = c
        for l, coeff in enumerate(self.coeffs):
            v = coeff[i, j]
            if v:
                exps = tuple(1 if t == l else 0 for t in range(self.num_vars))
                terms[exps] = v
        return Polynomial(self.num_vars, terms)

    def evaluate(self, pt: Point) -> ExactMatrix:
        if len(pt) != self.num_vars:
            raise ValueError(f"point has {len(pt)} coordinates, expected {self.num_vars}")
        out = [list(row) for row in self.const.entries]
        for value, coeff in zip(pt, self.coeffs):
            if value:
                for i in range(self.n):
                    for j in range(self.n):
                        out[i][j] += value * coeff[i, j]
        return ExactMatrix(out)

    def is_linear(self) -> bool:
        return self.const == ExactMatrix.zeros(self.n, self.n)

    def linear_part(self) -> "AffineMatrixPoly":
        return AffineMatrixPoly(ExactMatrix.zeros(self.n, self.n), self.coeffs)

    def add_constant(self, m: ExactMatrix) -> "AffineMatrixPoly":
        return AffineMatrixPoly(self.const + m, self.coeffs)

    def left_right_multiply(self, s: ExactMatrix, t: ExactMatrix) -> "AffineMatrixPoly":
        return AffineMatrixPoly(s @ self.const @ t, [s @ c @ t for c in self.coeffs])

    def submatrix(self, row_idx, col_idx) -> "AffineMatrixPoly":
        return AffineMatrixPoly(
            self.const.submatrix(row_idx, col_idx),
            [c.submatrix(row_idx, col_idx) for c in self.coeffs],
        )

    def delete_row_col(self, idx: int) -> "AffineMatrixPoly":
        keep = [i for i in range(self.n) if i != idx]
        return self.submatrix(keep, keep)

    def det_polynomial(self) -> Polynomial:
        """Full symbolic determinant by Leibniz expansion; meant for small n."""
        import itertools

        total = Polynomial.zero(self.num_vars)
        for perm in itertools.permutations(range(self.n)):
            inversions = sum(
                1 for a in range(self.n) for b in range(a + 1, self.n) if perm[a] > perm[b]
            )
            prod = Polynomial.constant(self.num_vars, -1 if inversions % 2 else 1)
            for i in range(self.n):
                prod = prod * self.entry_poly(i, perm[i])
            total = total + prod
        return total

    def __eq__(self, other):
        if not isinstance(other, AffineMatrixPoly):
            return NotImplemented
        return self.const == other.const and self.coeffs == other.coeffs


@dataclass(frozen=True)
class SingularNormalForm:
    """Transformation S, T with S*Q(x0)*T a trailing-ones diagonal of the
    given rank, det(S)*det(T) = 1, and the transformed linear part."""

    s: ExactMatrix
    t: ExactMatrix
    rank: int
    linear: AffineMatrixPoly


def _decompose_constant(m0: ExactMatrix):
    # Full-pivot elimination: returns (s, t, r) with s @ m0 @ t equal to a
    # 0/1 diagonal carrying r leading ones.
    n = m0.rows
    w = [list(row) for row in m0.entries]
    s = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    t = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def swap_rows(a, b):
        w[a], w[b] = w[b], w[a]
        s[a], s[b] = s[b], s[a]

    def swap_cols(a, b):
        for row in w:
            row[a], row[b] = row[b], row[a]
        for row in t:
            row[a], row[b] = row[b], row[a]

    r = 0
    for p in range(n):
        pivot = next(
            ((i, j) for j in range(p, n) for i in range(p, n) if w[i][j]),
            None,
        )
        if pivot is None:
            break
        i0, j0 = pivot
        if i0 != p:
            swap_rows(p, i0)
        if j0 != p:
            swap_cols(p, j0)
        pv = w[p][p]
        w[p] = [v / pv for v in w[p]]
        s[p] = [v / pv for v in s[p]]
        for i in range(p + 1, n):
            factor = w[i][p]
            if factor:
                w[i] = [a - factor * b for a, b in zip(w[i], w[p])]
                s[i] = [a - factor * b for a, b in zip(s[i], s[p])]
        for j in range(p + 1, n):
            factor = w[p][j]
            if factor:
                for row in w:
                    row[j] -= factor * row[p]
                for row in t:
                    row[j] -= factor * row[p]
        r += 1
    return ExactMatrix(s), ExactMatrix(t), r


def singular_normal_form(q: AffineMatrixPoly, x0: Point, verify_limit: int = 4) -> SingularNormalForm:
    """Normalize a representation around a point where its matrix is singular.

    Returns S, T with det(S*T) = 1 such that S*Q(x0)*T is diagonal with
    ones exactly in the last r positions, together with the transformed
    linear part A(x) = S*(Q(x0 + x) - Q(x0))*T.  Then
    det(A(x) + S*Q(x0)*T) = det(Q(x0 + x)).  Verified symbolically when
    n <= verify_limit.
    """
    x0 = point(x0)
    m0 = q.evaluate(x0)
    n = q.n
    s1, t1, r = _decompose_constant(m0)
    if r == n:
        raise ValueError("Q(x0) is invertible; need a singular point")
    # Cyclic shift moving the r leading ones to the trailing positions.
    sigma = [0] * n
    for i in range(n):
        sigma[i] = i + (n - r) if i < r else i - r
    s_rows = [None] * n
    for i in range(n):
        s_rows[sigma[i]] = list(s1.entries[i])
    t_cols_src = [0] * n
    for j in range(n):
        t_cols_src[sigma[j]] = j
    t_rows = [[row[t_cols_src[j]] for j in range(n)] for row in t1.entries]
    # det(S*T) = 1: rescale a row of S matching a zero row of the diagonal.
    delta = det_exact(ExactMatrix(s_rows)) * det_exact(ExactMatrix(t_rows))
    s_rows[0] = [v / delta for v in s_rows[0]]
    s = ExactMatrix(s_rows)
    t = ExactMatrix(t_rows)
    target = trailing_ones_matrix(n, r)
    if s @ m0 @ t != target:
        raise ArithmeticError("normal form construction failed")
    linear = q.linear_part().left_right_multiply(s, t)
    form = SingularNormalForm(s=s, t=t, rank=r, linear=linear)
    if n <= verify_limit:
        lhs = linear.add_constant(target).det_polynomial()
        rhs = shift(q.det_polynomial(), x0)
        if lhs != rhs:
            raise ArithmeticError("normal form verification failed")
    return form


def nonsingular_normal_form(q: AffineMatrixPoly, x0: Point, verify_limit: int = 4):
    """Normalize around a point where Q(x0) is invertible.

    Returns (A, alpha) with A(x) = Q(x0)^{-1} * (Q(x0 + x) - Q(x0)) linear
    and alpha = det(Q(x0)), so alpha * det(A(x) + I) = det(Q(x0 + x)).
    """
    x0 = point(x0)
    m0 = q.evaluate(x0)
    alpha = det_exact(m0)
    if not alpha:
        raise ValueError("Q(x0) is singular; need an invertible point")
    inv = inverse_exact(m0)
    linear = q.linear_part().left_right_multiply(inv, ExactMatrix.identity(q.n))
    if q.n <= verify_limit:
        lhs = linear.add_constant(ExactMatrix.identity(q.n)).det_polynomial() * alpha
        rhs = shift(q.det_polynomial(), x0)
        if lhs != rhs:
            raise ArithmeticError("normal form verification failed")
    return linear, alpha


# ---------------------------------------------------------------------------
# JSON serialization.


def matrix_to_json(m: ExactMatrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[fraction_to_json(v) for v in row] for row in m.entries],
    }


def matrix_from_json(obj) -> ExactMatrix:
    if not isinstance(obj, dict) or "entries" not in obj:
        raise ValueError("matrix object needs 'entries'")
    m = ExactMatrix([[fraction_from_json(v) for v in row] for row in obj["entries"]])
    if "rows" in obj and (m.rows != int(obj["rows"]) or m.cols != int(obj["cols"])):
        raise ValueError("matrix shape does not match declared size")
    return m


def affine_to_json(a: AffineMatrixPoly) -> dict:
    return {
        "n": a.n,
        "num_vars": a.num_vars,
        "const": matrix_to_json(a.const),
        "coeff": [matrix_to_json(c) for c in a.coeffs],
    }


def affine_from_json(obj) -> AffineMatrixPoly:
    if not isinstance(obj, dict) or "const" not in obj or "coeff" not in obj:
        raise ValueError("affine matrix object needs 'const' and 'coeff'")
    a = AffineMatrixPoly(matrix_from_json(obj["const"]), [matrix_from_json(c) for c in obj["coeff"]])
    if "n" in obj and a.n != int(obj["n"]):
        raise ValueError("affine matrix size mismatch")
    if "num_vars" in obj and a.num_vars != int(obj["num_vars"]):
        raise ValueError("affine matrix variable count mismatch")
    return a


def form_to_json(form: SingularNormalForm) -> dict:
    return {
        "s": matrix_to_json(form.s),
        "t": matrix_to_json(form.t),
        "rank": form.rank,
        "linear": affine_to_json(form.linear),
    }
