import itertools
import random
from fractions import Fraction

import pytest

from birank.exactla import (
    AffineMatrixPoly,
    ExactMatrix,
    Signature,
    affine_from_json,
    affine_to_json,
    det_exact,
    inverse_exact,
    kron,
    matrix_from_json,
    matrix_to_json,
    rank_exact,
    signature_exact,
    signature_lower_bound,
    singular_normal_form,
    solve_linear,
    trailing_ones_matrix,
    nonsingular_normal_form,
)
from birank.polyring import Polynomial, homogeneous_part, point, shift


def random_matrix(rng, rows, cols, span=4):
    return ExactMatrix([
        [Fraction(rng.randint(-span, span), rng.randint(1, 3)) for _ in range(cols)]
        for _ in range(rows)
    ])


def gauss_rank(m):
    # Plain fraction Gauss elimination, independent of the Bareiss path.
    rows = [list(r) for r in m.entries]
    rank = 0
    for col in range(m.cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def leibniz_det(m):
    n = m.rows
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        sign = (-1) ** sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        prod = Fraction(sign)
        for i in range(n):
            prod *= m[i, perm[i]]
        total += prod
    return total


def test_matrix_basics():
    a = ExactMatrix([[1, 2], [3, 4]])
    b = ExactMatrix([[0, 1], [1, 0]])
    assert (a @ b).entries == ExactMatrix([[2, 1], [4, 3]]).entries
    assert (a + b - b) == a
    assert a.transpose().transpose() == a
    assert a.scale(Fraction(1, 2))[1, 1] == 2
    assert trailing_ones_matrix(3, 1) == ExactMatrix.diagonal([0, 0, 1])
    with pytest.raises(ValueError):
        trailing_ones_matrix(2, 3)


def test_rank_exact_matches_gauss():
    rng = random.Random(0)
    for _ in range(40):
        m = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        assert rank_exact(m) == gauss_rank(m)


def test_rank_exact_known_rank_products():
    rng = random.Random(1)
    for _ in range(20):
        n = rng.randint(2, 6)
        r = rng.randint(1, min(3, n))
        while True:
            g = random_matrix(rng, n, r, span=3)
            h = random_matrix(rng, r, n, span=3)
            if gauss_rank(g) == r and gauss_rank(h) == r:
                break
        assert rank_exact(g @ h) == r


def test_det_and_inverse():
    rng = random.Random(2)
    for _ in range(25):
        n = rng.randint(1, 4)
        m = random_matrix(rng, n, n)
        assert det_exact(m) == leibniz_det(m)
        if det_exact(m):
            assert m @ inverse_exact(m) == ExactMatrix.identity(n)


def test_signature_diagonal_and_hyperbolic():
    assert signature_exact(ExactMatrix.diagonal([3, -1, 0, Fraction(1, 2)])) == Signature(2, 1, 1)
    assert signature_exact(ExactMatrix([[0, 5], [5, 0]])) == Signature(1, 1, 0)
    # Zero diagonal everywhere, rank-deficient off-diagonal pattern.
    m = ExactMatrix([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    assert signature_exact(m) == Signature(1, 1, 1)
    with pytest.raises(ValueError):
        signature_exact(ExactMatrix([[0, 1], [2, 0]]))


def test_signature_sylvester_invariance():
    # Congruence with an invertible G preserves inertia, so G^T D G must
    # report exactly the signs planted on the diagonal of D.
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 6)
        diag = [rng.choice([1, -1, 0]) * Fraction(rng.randint(1, 3)) for _ in range(n)]
        expected = Signature(
            sum(1 for v in diag if v > 0),
            sum(1 for v in diag if v < 0),
            sum(1 for v in diag if v == 0),
        )
        while True:
            g = random_matrix(rng, n, n, span=2)
            if det_exact(g):
                break
        m = g.transpose() @ ExactMatrix.diagonal(diag) @ g
        assert signature_exact(m) == expected
        assert rank_exact(m) == expected.rank


def test_signature_lower_bound():
    # For any square Q, rank(Q) >= max inertia of Q + Q^T.
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(1, 5)
        q = random_matrix(rng, n, n)
        assert rank_exact(q) >= signature_lower_bound(q)
    skew = ExactMatrix([[0, 1], [-1, 0]])
    assert signature_lower_bound(skew) == 0


def test_kron_signature_multiplies():
    a = ExactMatrix([[0, 1], [1, 0]])
    b = ExactMatrix.diagonal([1, 1, -1])
    k = kron(a, b)
    assert k.rows == 6
    # inertia of a kron product of symmetric matrices: (p1*p2+m1*m2, p1*m2+m1*p2, rest)
    assert signature_exact(k) == Signature(3, 3, 0)


def test_solve_linear():
    rows = [[1, 1, 0], [0, 1, 1]]
    particular, basis = solve_linear(rows, [3, 5])
    assert len(basis) == 1
    for vec in [particular] + [[p + b for p, b in zip(particular, basis[0])]]:
        assert vec[0] + vec[1] == 3
        assert vec[1] + vec[2] == 5
    assert solve_linear([[1], [1]], [0, 1]) is None


def affine_from_grid(grid):
    return AffineMatrixPoly.from_entry_polys(grid)


def test_affine_entry_round_trip():
    x1 = Polynomial.variable(2, 0)
    x2 = Polynomial.variable(2, 1)
    grid = [[x1 + 1, x2], [x1 - x2, Polynomial.constant(2, 3)]]
    a = affine_from_grid(grid)
    for i in range(2):
        for j in range(2):
            assert a.entry_poly(i, j) == grid[i][j]
    assert a.evaluate(point([1, 2])) == ExactMatrix([[2, 2], [-1, 3]])
    assert affine_from_json(affine_to_json(a)) == a


def test_affine_det_matches_entry_expansion():
    rng = random.Random(5)
    for _ in range(10):
        n, num_vars = rng.randint(1, 3), rng.randint(1, 3)
        grid = []
        for i in range(n):
            row = []
            for j in range(n):
                terms = {(0,) * num_vars: Fraction(rng.randint(-2, 2))}
                for l in range(num_vars):
                    exps = tuple(1 if t == l else 0 for t in range(num_vars))
                    terms[exps] = Fraction(rng.randint(-2, 2))
                row.append(Polynomial(num_vars, terms))
            grid.append(row)
        a = affine_from_grid(grid)
        det = a.det_polynomial()
        for _ in range(3):
            pt = point(Fraction(rng.randint(-3, 3)) for _ in range(num_vars))
            assert det.eval(pt) == det_exact(a.evaluate(pt))


def perm2_representation():
    # det of this matrix is the 2x2 permanent.
    x = [Polynomial.variable(4, i) for i in range(4)]
    return affine_from_grid([[x[0], -x[1]], [x[2], x[3]]])


def test_singular_normal_form_perm2():
    q = perm2_representation()
    x0 = point([1, 1, 1, -1])
    form = singular_normal_form(q, x0)
    assert form.rank == 1
    lam = trailing_ones_matrix(2, 1)
    assert form.s @ q.evaluate(x0) @ form.t == lam
    assert det_exact(form.s) * det_exact(form.t) == 1
    # The construction's own symbolic verification ran (n <= 4); check the
    # degree-2 slice is the shifted permanent's quadratic part too.
    p_shifted = shift(q.det_polynomial(), x0)
    lhs = form.linear.add_constant(lam).det_polynomial()
    assert lhs == p_shifted
    assert not homogeneous_part(p_shifted, 2).is_zero()


def test_singular_normal_form_random():
    rng = random.Random(6)
    built = 0
    while built < 12:
        n, num_vars = rng.randint(2, 3), rng.randint(1, 3)
        const_rows = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        const = ExactMatrix(const_rows)
        if det_exact(const):
            continue
        coeffs = [random_matrix(rng, n, n, span=2) for _ in range(num_vars)]
        q = AffineMatrixPoly(const, coeffs)
        form = singular_normal_form(q, point([0] * num_vars))
        lam = trailing_ones_matrix(n, form.rank)
        assert form.s @ const @ form.t == lam
        assert det_exact(form.s) * det_exact(form.t) == 1
        assert form.linear.is_linear()
        built += 1


def test_singular_normal_form_rejects_invertible_point():
    q = perm2_representation()
    with pytest.raises(ValueError):
        singular_normal_form(q, point([1, 0, 0, 1]))


def test_nonsingular_normal_form_perm2():
    q = perm2_representation()
    x0 = point([1, 0, 0, 1])
    linear, alpha = nonsingular_normal_form(q, x0)
    assert alpha == 1
    assert linear.is_linear()
    with pytest.raises(ValueError):
        nonsingular_normal_form(q, point([1, 1, 1, -1]))


def test_matrix_json_round_trip():
    rng = random.Random(7)
    m = random_matrix(rng, 3, 2)
    assert matrix_from_json(matrix_to_json(m)) == m
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 1})
