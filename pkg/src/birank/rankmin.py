"""Gram constraint systems for writing a degree-2k form as v(x)^T Q v(x),
and certified rank intervals over their solution sets.

A form p of degree 2k in D variables equals v(x)^T Q v(x), with v the
vector of all degree-k monomials, exactly when Q satisfies one linear
equation per degree-2k monomial: the entries of Q along each anti-chain
{(I, J): I + J = H} must sum to the coefficient of x^H.  The minimum rank
of a solution is the bi-polynomial rank of p; the minimum over symmetric
solutions and over differences of two PSD matrices sandwich it.  This
module builds those systems explicitly (including a projected multilinear
variant tied to the shifted permanent), checks and solves them exactly,
and computes sound lower/upper bounds for the minimum rank over rational
solutions.

Equations store their coefficients entry by entry, never folded into an
upper triangle, so the documented coefficient sets (for the projected
system: only 0 and +-1) survive serialization.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from birank.exactla import (
    ExactMatrix,
    rank_exact,
    signature_lower_bound,
    solve_linear,
)
from birank.polyring import (
    Exponent,
    Polynomial,
    fraction_to_json,
    monomial_count,
    monomial_index_set,
)


@dataclass(frozen=True)
class LinearEquation:
    """sum of coef * M_block[i][j] over terms == rhs."""

    terms: Tuple[Tuple[int, int, int, Fraction], ...]
    rhs: Fraction


@dataclass(frozen=True)
class ConstraintSystem:
    size: int
    pair: bool
    symmetric: bool
    num_vars: int
    half_degree: int
    basis: Tuple[Exponent, ...]
    equations: Tuple[LinearEquation, ...]
    scale: Optional[Fraction] = None

    @property
    def block_count(self) -> int:
        return 2 if self.pair else 1


def _require_even_form(p: Polynomial) -> int:
    if p.is_zero():
        raise ValueError("cannot build a Gram system for the zero polynomial")
    if not p.is_homogeneous():
        raise ValueError("Gram systems need a homogeneous polynomial")
    deg = p.degree()
    if deg % 2 or deg == 0:
        raise ValueError(f"degree {deg} is not even and positive")
    return deg // 2


def _anti_chains(basis):
    # For each degree-2k monomial H, the ordered index pairs with
    # basis[i] + basis[j] = H.
    groups: Dict[Exponent, List[Tuple[int, int]]] = {}
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            h = tuple(a + b for a, b in zip(bi, bj))
            groups.setdefault(h, []).append((i, j))
    return groups


def _gram_equations(p: Polynomial, k: int, pair: bool):
    basis = tuple(monomial_index_set(p.num_vars, k))
    groups = _anti_chains(basis)
    equations = []
    for h in monomial_index_set(p.num_vars, 2 * k):
        terms = []
        for i, j in groups.get(h, []):
            terms.append((0, i, j, Fraction(1)))
            if pair:
                terms.append((1, i, j, Fraction(-1)))
        equations.append(LinearEquation(terms=tuple(terms), rhs=p.coefficient(h)))
    return basis, tuple(equations)


def build_affine_system(p: Polynomial) -> ConstraintSystem:
    """All matrices Q with v(x)^T Q v(x) = p: minimum rank over the
    solutions equals the bi-polynomial rank of p."""
    k = _require_even_form(p)
    basis, equations = _gram_equations(p, k, pair=False)
    return ConstraintSystem(
        size=len(basis), pair=False, symmetric=False, num_vars=p.num_vars,
        half_degree=k, basis=basis, equations=equations,
    )


def build_sym_system(p: Polynomial) -> ConstraintSystem:
    """Same equations restricted to symmetric Q; half the minimum rank here
    lower-bounds the bi-polynomial rank."""
    k = _require_even_form(p)
    basis, equations = _gram_equations(p, k, pair=False)
    return ConstraintSystem(
        size=len(basis), pair=False, symmetric=True, num_vars=p.num_vars,
        half_degree=k, basis=basis, equations=equations,
    )


def build_psd_pair_system(p: Polynomial) -> ConstraintSystem:
    """Pairs (Q_plus, Q_minus) of symmetric matrices with
    v^T (Q_plus - Q_minus) v = p; restricting both to PSD and minimizing
    rank(Q_plus) + rank(Q_minus) upper-bounds twice the bi-polynomial rank
    and lower-bounds it."""
    k = _require_even_form(p)
    basis, equations = _gram_equations(p, k, pair=True)
    return ConstraintSystem(
        size=len(basis), pair=True, symmetric=True, num_vars=p.num_vars,
        half_degree=k, basis=basis, equations=equations,
    )


def insert_zeros(exps: Exponent, d: int) -> Exponent:
    """Lift an exponent tuple over the (d-1) x (d-1) matrix variables to the
    d x d variables, zero-padding the last row and column."""
    if len(exps) != (d - 1) * (d - 1):
        raise ValueError(f"expected {(d - 1) * (d - 1)} exponents")
    out = [0] * (d * d)
    for pos, e in enumerate(exps):
        i, j = divmod(pos, d - 1)
        out[i * d + j] = e
    return tuple(out)


def multilinear_index_set(num_vars: int, k: int) -> list:
    """All 0/1 exponent tuples of weight k, in graded-lex order."""
    out = []
    for support in itertools.combinations(range(num_vars), k):
        exps = [0] * num_vars
        for pos in support:
            exps[pos] = 1
        out.append(tuple(exps))
    return out


def _permutation_like(exps: Exponent, d: int) -> bool:
    # Reshaped as a (d-1) x (d-1) 0/1 matrix: every row and column sum <= 1.
    m = d - 1
    rows = [0] * m
    cols = [0] * m
    for pos, e in enumerate(exps):
        if e:
            i, j = divmod(pos, m)
            rows[i] += e
            cols[j] += e
    return all(v <= 1 for v in rows) and all(v <= 1 for v in cols)


def build_z2k(d: int, k: int) -> ConstraintSystem:
    """Projected multilinear pair system for the degree-2k slice of the
    permanent expanded at its singular point, over the (d-1) x (d-1)
    top-left matrix variables.

    One equation per multilinear degree-2k monomial H: the split entries
    of U - V sum to 1 when H reads as a partial permutation (all row and
    column sums at most one) and to 0 otherwise.  All coefficients are 0
    or +-1.  The scale field carries the projection factor
    -1/(2k * (d-2k-1)!) that maps solutions of the full system onto
    solutions of this one.  Requires d >= 2k + 1.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if d <= 2 * k:
        raise ValueError(f"need d >= {2 * k + 1} for the projected system")
    num_vars = (d - 1) * (d - 1)
    basis = tuple(multilinear_index_set(num_vars, k))
    index_of = {exps: i for i, exps in enumerate(basis)}
    equations = []
    for h in multilinear_index_set(num_vars, 2 * k):
        support = [pos for pos, e in enumerate(h) if e]
        terms = []
        for left in itertools.combinations(support, k):
            left_exps = [0] * num_vars
            for pos in left:
                left_exps[pos] = 1
            right_exps = [a - b for a, b in zip(h, left_exps)]
            i = index_of[tuple(left_exps)]
            j = index_of[tuple(right_exps)]
            terms.append((0, i, j, Fraction(1)))
            terms.append((1, i, j, Fraction(-1)))
        rhs = Fraction(1) if _permutation_like(h, d) else Fraction(0)
        equations.append(LinearEquation(terms=tuple(terms), rhs=rhs))
    scale = Fraction(-1, 2 * k * math.factorial(d - 2 * k - 1))
    return ConstraintSystem(
        size=len(basis), pair=True, symmetric=True, num_vars=num_vars,
        half_degree=k, basis=basis, equations=tuple(equations), scale=scale,
    )


def project_pair_to_z2k(plus: ExactMatrix, minus: ExactMatrix, d: int, k: int):
    """Project a solution pair of the full d x d pair system onto the
    multilinear system built by build_z2k: restrict both matrices to the
    multilinear monomials supported on the top-left block and multiply by
    the system's scale."""
    z = build_z2k(d, k)
    full_basis = monomial_index_set(d * d, k)
    full_index = {exps: i for i, exps in enumerate(full_basis)}
    rows = [full_index[insert_zeros(exps, d)] for exps in z.basis]
    out = []
    for m in (plus, minus):
        if m.rows != len(full_basis) or m.cols != len(full_basis):
            raise ValueError("matrix is not indexed by the full degree-k basis")
        out.append(m.submatrix(rows, rows).scale(z.scale))
    return out[0], out[1]


@dataclass(frozen=True)
class ProjectionCounts:
    full_basis: int
    multilinear_basis: int

    @property
    def gap(self) -> int:
        return self.full_basis - self.multilinear_basis


def projection_sandwich(d: int, k: int) -> ProjectionCounts:
    """Basis sizes on the two sides of the projection: all degree-k
    monomials in d^2 variables vs multilinear ones in (d-1)^2 variables."""
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    return ProjectionCounts(
        full_basis=monomial_count(d * d, k),
        multilinear_basis=math.comb((d - 1) * (d - 1), k),
    )


# ---------------------------------------------------------------------------
# Evaluating, checking, solving.


def _as_blocks(cs: ConstraintSystem, matrices) -> Tuple[ExactMatrix, ...]:
    if isinstance(matrices, ExactMatrix):
        matrices = (matrices,)
    matrices = tuple(matrices)
    if len(matrices) != cs.block_count:
        raise ValueError(f"expected {cs.block_count} matrices, got {len(matrices)}")
    for m in matrices:
        if m.rows != cs.size or m.cols != cs.size:
            raise ValueError(f"matrices must be {cs.size} x {cs.size}")
        if cs.symmetric and not m.is_symmetric():
            raise ValueError("system requires symmetric matrices")
    return matrices


def gram_expand(cs: ConstraintSystem, matrices) -> Polynomial:
    """v(x)^T Q v(x) for a single matrix, or the difference of the two
    blocks for a pair system, over the system's monomial basis."""
    matrices = _as_blocks(cs, matrices)
    acc: Dict[Exponent, Fraction] = {}
    signs = (1, -1)
    for b, m in enumerate(matrices):
        sign = signs[b]
        for i, bi in enumerate(cs.basis):
            for j, bj in enumerate(cs.basis):
                v = m[i, j]
                if v:
                    h = tuple(a + b2 for a, b2 in zip(bi, bj))
                    acc[h] = acc.get(h, Fraction(0)) + sign * v
    return Polynomial(cs.num_vars, acc)


def check_solution(cs: ConstraintSystem, matrices) -> bool:
    matrices = _as_blocks(cs, matrices)
    for eq in cs.equations:
        total = Fraction(0)
        for block, i, j, coef in eq.terms:
            total += coef * matrices[block][i, j]
        if total != eq.rhs:
            return False
    return True


def _variable_layout(cs: ConstraintSystem):
    # Column index for each matrix entry; symmetric systems share one
    # unknown per unordered pair.
    layout = {}
    order = []
    for b in range(cs.block_count):
        for i in range(cs.size):
            for j in range(cs.size):
                key = (b, min(i, j), max(i, j)) if cs.symmetric else (b, i, j)
                if key not in layout:
                    layout[key] = len(order)
                    order.append(key)
    return layout, order


def _matrices_from_vector(cs: ConstraintSystem, layout, vec) -> Tuple[ExactMatrix, ...]:
    mats = []
    for b in range(cs.block_count):
        rows = []
        for i in range(cs.size):
            row = []
            for j in range(cs.size):
                key = (b, min(i, j), max(i, j)) if cs.symmetric else (b, i, j)
                row.append(vec[layout[key]])
            rows.append(row)
        mats.append(ExactMatrix(rows))
    return tuple(mats)


def _linear_system(cs: ConstraintSystem):
    layout, order = _variable_layout(cs)
    rows = []
    rhs = []
    for eq in cs.equations:
        row = [Fraction(0)] * len(order)
        for block, i, j, coef in eq.terms:
            key = (block, min(i, j), max(i, j)) if cs.symmetric else (block, i, j)
            row[layout[key]] += coef
        rows.append(row)
        rhs.append(eq.rhs)
    return layout, order, rows, rhs


def solve_feasible(cs: ConstraintSystem) -> Tuple[ExactMatrix, ...]:
    """One exact solution of the system (free variables zero); raises on an
    infeasible system."""
    layout, order, rows, rhs = _linear_system(cs)
    solved = solve_linear(rows, rhs)
    if solved is None:
        raise ValueError("constraint system is infeasible")
    particular, _ = solved
    return _matrices_from_vector(cs, layout, particular)


# ---------------------------------------------------------------------------
# Rank interval over the rational solution set.


@dataclass(frozen=True)
class MinrankInterval:
    lower: int
    upper: int
    lower_method: str
    upper_method: str
    free_dimension: int


def _sample_values():
    values = {Fraction(0)}
    for den in range(1, 9):
        for num in range(-8, 9):
            values.add(Fraction(num, den))
    return sorted(values)


def _rank_of(mats) -> int:
    return sum(rank_exact(m) for m in mats)


def _block_diag(mats) -> ExactMatrix:
    total = sum(m.rows for m in mats)
    rows = [[Fraction(0)] * total for _ in range(total)]
    offset = 0
    for m in mats:
        for i in range(m.rows):
            for j in range(m.cols):
                rows[offset + i][offset + j] = m[i, j]
        offset += m.rows
    return ExactMatrix(rows)


def _symbolic_solution_matrix(cs, layout, particular, basis_vecs):
    # Entries of the general solution as polynomials in the free parameters.
    f = len(basis_vecs)
    mats = []
    for b in range(cs.block_count):
        rows = []
        for i in range(cs.size):
            row = []
            for j in range(cs.size):
                key = (b, min(i, j), max(i, j)) if cs.symmetric else (b, i, j)
                col = layout[key]
                terms = {}
                if particular[col]:
                    terms[(0,) * f] = particular[col]
                for l, vec in enumerate(basis_vecs):
                    if vec[col]:
                        exps = tuple(1 if t == l else 0 for t in range(f))
                        terms[exps] = vec[col]
                row.append(Polynomial(f, terms))
            rows.append(row)
        mats.append(rows)
    if cs.block_count == 1:
        return mats[0]
    # Stack the pair block-diagonally; its rank is the sum of block ranks.
    n = cs.size
    zero = Polynomial.zero(f)
    grid = [[zero] * (2 * n) for _ in range(2 * n)]
    for b, block in enumerate(mats):
        for i in range(n):
            for j in range(n):
                grid[b * n + i][b * n + j] = block[i][j]
    return grid


def _poly_det(grid, rows, cols):
    total = None
    for perm in itertools.permutations(range(len(rows))):
        inversions = sum(
            1 for a in range(len(rows)) for b in range(a + 1, len(rows)) if perm[a] > perm[b]
        )
        prod = None
        for a, i in enumerate(rows):
            entry = grid[i][cols[perm[a]]]
            prod = entry if prod is None else prod * entry
        signed = prod if inversions % 2 == 0 else -prod
        total = signed if total is None else total + signed
    return total


def _univariate_rational_roots(p: Polynomial):
    if p.num_vars != 1:
        raise ValueError("univariate only")
    if p.is_zero():
        return None  # everything is a root
    coeffs: Dict[int, Fraction] = {e[0]: c for e, c in p.terms.items()}
    degree = max(coeffs)
    scale = math.lcm(*(c.denominator for c in coeffs.values()))
    ints = {e: int(c * scale) for e, c in coeffs.items()}
    low = min(ints)
    roots = set()
    if low > 0:
        roots.add(Fraction(0))
    a0 = ints[low]
    lead = ints[degree]

    def divisors(v):
        v = abs(v)
        out = []
        for cand in range(1, int(math.isqrt(v)) + 1):
            if v % cand == 0:
                out.extend((cand, v // cand))
        return set(out)

    for num in divisors(a0):
        for den in divisors(lead):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if p.eval((cand,)) == 0:
                    roots.add(cand)
    return sorted(roots)


def minrank_interval(cs: ConstraintSystem, budget: int = 6, seed: int = 0) -> MinrankInterval:
    """Sound interval [lower, upper] for the minimum rank over rational
    solutions of the system (for pair systems, the minimum of the summed
    block ranks; PSD constraints are not imposed here).

    The upper bound is the smallest rank found by exact sampling of the
    solution space (origin, axis sweeps, a small grid in dimension two,
    and seeded random points).  The lower bound uses, in order of
    preference: uniqueness of the solution; the inertia of the symmetric
    part when every nullspace direction is skew-symmetric (then all
    solutions share one symmetric part, whose max inertia bounds every
    rank); a constant nonzero minor of the parametrized solution (which
    survives every parameter choice); and, with one free parameter, minor
    systems with no rational root.  Raises on an infeasible system or when
    the free dimension exceeds budget.
    """
    layout, order, rows, rhs = _linear_system(cs)
    solved = solve_linear(rows, rhs)
    if solved is None:
        raise ValueError("constraint system is infeasible")
    particular, basis_vecs = solved
    f = len(basis_vecs)
    if f > budget:
        raise ValueError(f"free dimension {f} exceeds budget {budget}")

    def mats_at(tvec):
        vec = list(particular)
        for t, direction in zip(tvec, basis_vecs):
            if t:
                vec = [a + t * b for a, b in zip(vec, direction)]
        return _matrices_from_vector(cs, layout, vec)

    base_mats = mats_at([Fraction(0)] * f)
    upper = _rank_of(base_mats)
    upper_method = "origin"
    if f == 0:
        return MinrankInterval(upper, upper, "unique-solution", "unique-solution", 0)

    values = _sample_values()

    def consider(tvec, method):
        nonlocal upper, upper_method
        r = _rank_of(mats_at(tvec))
        if r < upper:
            upper = r
            upper_method = method

    for axis in range(f):
        for v in values:
            if v:
                tvec = [Fraction(0)] * f
                tvec[axis] = v
                consider(tvec, "axis-sweep")
    if f == 2 and cs.size * cs.block_count <= 8:
        coarse = [Fraction(n, d) for d in (1, 2, 3) for n in range(-3 * d, 3 * d + 1)]
        coarse = sorted(set(coarse))
        for va in coarse:
            for vb in coarse:
                if va or vb:
                    consider([va, vb], "grid")
    rng = random.Random(seed)
    for _ in range(300):
        tvec = [rng.choice(values) for _ in range(f)]
        consider(tvec, "random-sample")

    # Lower bound routes.
    lower = 0
    lower_method = "trivial"
    if any(eq.rhs for eq in cs.equations):
        lower, lower_method = 1, "nonzero-form"

    if not cs.symmetric and not cs.pair:
        null_mats = [_matrices_from_vector(cs, layout, vec)[0] for vec in basis_vecs]
        if all(n + n.transpose() == ExactMatrix.zeros(cs.size, cs.size) for n in null_mats):
            # Every solution then shares one symmetric part, so its max
            # inertia bounds the rank of every solution.
            cand = signature_lower_bound(base_mats[0])
            if cand > lower:
                lower, lower_method = cand, "shared-symmetric-part-inertia"

    total_size = cs.size * cs.block_count
    if total_size <= 6:
        grid = _symbolic_solution_matrix(cs, layout, particular, basis_vecs)
        n = len(grid)
        for m in (2, 3):
            if m > n or lower >= m:
                continue
            found_constant = False
            all_minors = []
            for ridx in itertools.combinations(range(n), m):
                for cidx in itertools.combinations(range(n), m):
                    minor = _poly_det(grid, list(ridx), list(cidx))
                    all_minors.append(minor)
                    if not minor.is_zero() and minor.degree() == 0:
                        found_constant = True
                        break
                if found_constant:
                    break
            if found_constant and m > lower:
                lower, lower_method = m, "constant-minor"
                continue
            if f == 1 and not found_constant:
                # No rational parameter kills every m-minor -> rank >= m
                # at every rational point.
                nonzero = [q for q in all_minors if not q.is_zero()]
                if not nonzero:
                    continue
                roots = _univariate_rational_roots(nonzero[0])
                if roots is None:
                    continue
                common = [t for t in roots if all(q.eval((t,)) == 0 for q in nonzero)]
                if not common and m > lower:
                    lower, lower_method = m, "minor-system-no-rational-root"
                for t in common:
                    consider([t], "minor-root")

    if lower > upper:
        raise ArithmeticError("lower bound exceeded an exhibited solution; routes disagree")
    return MinrankInterval(lower, upper, lower_method, upper_method, f)


# ---------------------------------------------------------------------------
# JSON serialization (triplet format).


def _coef_to_json(c: Fraction):
    if c.denominator == 1:
        return int(c)
    return f"{c.numerator}/{c.denominator}"


def _coef_from_json(obj) -> Fraction:
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        return Fraction(obj)
    raise ValueError(f"bad coefficient {obj!r}")


def system_to_json(cs: ConstraintSystem) -> dict:
    return {
        "n": cs.size,
        "pair": cs.pair,
        "symmetric": cs.symmetric,
        "num_vars": cs.num_vars,
        "k": cs.half_degree,
        "scale": fraction_to_json(cs.scale) if cs.scale is not None else None,
        "basis": [list(b) for b in cs.basis],
        "eqs": [
            {
                "terms": [[b, i, j, _coef_to_json(c)] for b, i, j, c in eq.terms],
                "rhs": fraction_to_json(eq.rhs),
            }
            for eq in cs.equations
        ],
    }


def system_from_json(obj) -> ConstraintSystem:
    from birank.polyring import fraction_from_json

    required = {"n", "pair", "eqs"}
    if not isinstance(obj, dict) or not required <= set(obj):
        raise ValueError("constraint system object needs 'n', 'pair', 'eqs'")
    basis = tuple(tuple(int(e) for e in b) for b in obj.get("basis", []))
    equations = []
    for eq in obj["eqs"]:
        terms = tuple(
            (int(t[0]), int(t[1]), int(t[2]), _coef_from_json(t[3])) for t in eq["terms"]
        )
        equations.append(LinearEquation(terms=terms, rhs=fraction_from_json(eq["rhs"])))
    scale = obj.get("scale")
    return ConstraintSystem(
        size=int(obj["n"]),
        pair=bool(obj["pair"]),
        symmetric=bool(obj.get("symmetric", False)),
        num_vars=int(obj.get("num_vars", len(basis[0]) if basis else 0)),
        half_degree=int(obj.get("k", 1)),
        basis=basis,
        equations=tuple(equations),
        scale=fraction_from_json(scale) if scale else None,
    )
