import itertools
import math
import random
from fractions import Fraction

import pytest

from birank.exactla import ExactMatrix, rank_exact
from birank.permhess import hessian_perm_fast, perm_zero_point
from birank.polyring import (
    Polynomial,
    homogeneous_part,
    monomial_count,
    monomial_index_set,
    perm_poly,
    point,
    shift,
)
from birank.rankmin import (
    ConstraintSystem,
    build_affine_system,
    build_psd_pair_system,
    build_sym_system,
    build_z2k,
    check_solution,
    gram_expand,
    insert_zeros,
    minrank_interval,
    multilinear_index_set,
    project_pair_to_z2k,
    projection_sandwich,
    solve_feasible,
    system_from_json,
    system_to_json,
)


def poly_from_coeffs(num_vars, coeffs):
    return Polynomial(num_vars, {e: Fraction(c) for e, c in coeffs.items()})


def x1x2():
    return poly_from_coeffs(2, {(1, 1): 1})


def sum_of_squares():
    return poly_from_coeffs(2, {(2, 0): 1, (0, 2): 1})


def perm2_slice():
    p = perm_poly(2)
    x0 = perm_zero_point(2)
    return homogeneous_part(shift(p, x0), 2)


def test_affine_system_shape():
    cs = build_affine_system(x1x2())
    assert cs.size == 2 and not cs.pair and not cs.symmetric
    assert cs.half_degree == 1
    assert len(cs.equations) == monomial_count(2, 2)
    # One equation per degree-2 monomial, split entries only.
    for eq in cs.equations:
        for block, i, j, coef in eq.terms:
            assert block == 0
            assert coef == 1


def test_sym_and_pair_flags():
    sym = build_sym_system(sum_of_squares())
    assert sym.symmetric and not sym.pair
    pair = build_psd_pair_system(sum_of_squares())
    assert pair.symmetric and pair.pair
    blocks = {t[0] for eq in pair.equations for t in eq.terms}
    assert blocks == {0, 1}


def test_build_rejects_bad_input():
    with pytest.raises(ValueError):
        build_affine_system(Polynomial.zero(2))
    with pytest.raises(ValueError):
        build_affine_system(poly_from_coeffs(2, {(1, 0): 1}))  # odd degree
    inhom = poly_from_coeffs(2, {(2, 0): 1, (1, 0): 1})
    with pytest.raises(ValueError):
        build_affine_system(inhom)


def test_gram_expand_and_check_solution():
    p = sum_of_squares()
    cs = build_affine_system(p)
    q = ExactMatrix([[Fraction(1), Fraction(3)], [Fraction(-3), Fraction(1)]])
    assert gram_expand(cs, q) == p
    assert check_solution(cs, q)
    bad = ExactMatrix([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]])
    assert not check_solution(cs, bad)


def test_check_solution_matches_gram_expand():
    # The equations say exactly that the expansion reproduces the form.
    rng = random.Random(5)
    for _ in range(20):
        num_vars = rng.randint(2, 3)
        k = 1
        basis = monomial_index_set(num_vars, k)
        s = len(basis)
        q = ExactMatrix(
            [[Fraction(rng.randint(-3, 3)) for _ in range(s)] for _ in range(s)]
        )
        target = poly_from_coeffs(
            num_vars,
            {tuple(e): rng.randint(-4, 4) for e in monomial_index_set(num_vars, 2 * k)},
        )
        if target.is_zero():
            continue
        cs = build_affine_system(target)
        assert check_solution(cs, q) == (gram_expand(cs, q) == target)


def test_solve_feasible_produces_solution():
    for p in (x1x2(), sum_of_squares(), perm2_slice()):
        for build in (build_affine_system, build_sym_system, build_psd_pair_system):
            cs = build(p)
            mats = solve_feasible(cs)
            assert check_solution(cs, mats)
            assert gram_expand(cs, mats) == p


def test_solve_feasible_symmetric_output():
    cs = build_sym_system(x1x2())
    (q,) = solve_feasible(cs)
    assert q.is_symmetric()
    assert q[0, 1] == Fraction(1, 2)


def test_minrank_interval_x1x2_affine():
    iv = minrank_interval(build_affine_system(x1x2()))
    assert (iv.lower, iv.upper) == (1, 1)


def test_minrank_interval_sum_of_squares():
    iv = minrank_interval(build_affine_system(sum_of_squares()))
    assert (iv.lower, iv.upper) == (2, 2)


def test_minrank_interval_sym_unique():
    # Symmetric solutions of x1*x2 form a point; rank 2 exactly.
    iv = minrank_interval(build_sym_system(x1x2()))
    assert (iv.lower, iv.upper) == (2, 2)
    assert iv.lower_method == "unique-solution"
    assert iv.free_dimension == 0


def test_minrank_interval_perm2_slice():
    iv = minrank_interval(build_affine_system(perm2_slice()))
    assert (iv.lower, iv.upper) == (2, 2)


def test_minrank_interval_brute_force_agreement():
    # Oracle: exhaustive minimum rank over a coarse lattice of solutions.
    rng = random.Random(11)
    lattice = [Fraction(v) for v in (-2, -1, 0, 1, 2)]
    for _ in range(6):
        coeffs = {
            tuple(e): rng.randint(-2, 2) for e in monomial_index_set(2, 2)
        }
        p = poly_from_coeffs(2, coeffs)
        if p.is_zero():
            continue
        cs = build_affine_system(p)
        iv = minrank_interval(cs)
        best = None
        for a in lattice:
            for b in lattice:
                for c in lattice:
                    for d in lattice:
                        q = ExactMatrix([[a, b], [c, d]])
                        if check_solution(cs, q):
                            r = rank_exact(q)
                            best = r if best is None else min(best, r)
        if best is not None:
            assert iv.lower <= best
            assert iv.upper <= best or iv.upper == best


def test_minrank_interval_budget():
    p = perm2_slice()
    with pytest.raises(ValueError):
        minrank_interval(build_affine_system(p), budget=2)


def test_minrank_interval_infeasible():
    cs = build_affine_system(x1x2())
    bad = ConstraintSystem(
        size=cs.size,
        pair=cs.pair,
        symmetric=cs.symmetric,
        num_vars=cs.num_vars,
        half_degree=cs.half_degree,
        basis=cs.basis,
        equations=cs.equations
        + (cs.equations[0].__class__(terms=(), rhs=Fraction(1)),),
    )
    with pytest.raises(ValueError):
        minrank_interval(bad)


def test_insert_zeros_layout():
    d = 3
    exps = (1, 0, 0, 2)  # entries (1,1) and (2,2) of the top-left block
    lifted = insert_zeros(exps, d)
    assert len(lifted) == 9
    assert lifted[0] == 1 and lifted[4] == 2
    assert sum(lifted) == 3
    with pytest.raises(ValueError):
        insert_zeros((1, 0), 3)


def test_multilinear_index_set_graded_lex():
    got = multilinear_index_set(4, 2)
    assert got[0] == (1, 1, 0, 0)
    assert got[-1] == (0, 0, 1, 1)
    assert len(got) == math.comb(4, 2)
    assert all(sum(e) == 2 and set(e) <= {0, 1} for e in got)


def test_z2k_d3_k1_equations():
    cs = build_z2k(3, 1)
    assert cs.pair and cs.symmetric
    assert cs.size == 4
    assert len(cs.equations) == 6
    ones = [eq for eq in cs.equations if eq.rhs == 1]
    zeros = [eq for eq in cs.equations if eq.rhs == 0]
    assert len(ones) == 2 and len(zeros) == 4
    coefs = {c for eq in cs.equations for _, _, _, c in eq.terms}
    assert coefs <= {Fraction(1), Fraction(-1)}
    assert cs.scale == Fraction(-1, 2)


def test_z2k_rejects_small_d():
    with pytest.raises(ValueError):
        build_z2k(2, 1)
    with pytest.raises(ValueError):
        build_z2k(4, 2)
    with pytest.raises(ValueError):
        build_z2k(3, 0)


def test_projected_hessian_pair_satisfies_z2k():
    # A solution pair of the full quadratic-slice system projects onto a
    # solution of the multilinear system.
    for d in (3, 4):
        h = hessian_perm_fast(d)
        half = h.scale(Fraction(1, 2))
        zero = ExactMatrix.zeros(d * d, d * d)
        p = homogeneous_part(shift(perm_poly(d), perm_zero_point(d)), 2)
        full = build_psd_pair_system(p)
        assert check_solution(full, (half, zero))
        plus, minus = project_pair_to_z2k(half, zero, d, 1)
        cs = build_z2k(d, 1)
        assert check_solution(cs, (plus, minus))


def test_projection_sandwich_counts():
    pc = projection_sandwich(3, 1)
    assert pc.full_basis == 9
    assert pc.multilinear_basis == 4
    assert pc.gap == 5
    pc2 = projection_sandwich(5, 2)
    assert pc2.full_basis == monomial_count(25, 2)
    assert pc2.multilinear_basis == math.comb(16, 2)


def test_system_json_round_trip():
    for cs in (build_affine_system(x1x2()), build_z2k(3, 1)):
        obj = system_to_json(cs)
        assert set(obj) >= {"n", "pair", "eqs"}
        back = system_from_json(obj)
        assert back == cs


def test_system_json_coefficient_encoding():
    obj = system_to_json(build_z2k(3, 1))
    for eq in obj["eqs"]:
        for term in eq["terms"]:
            assert isinstance(term[3], int)
            assert term[3] in (1, -1)


def test_gram_expand_pair_subtracts():
    p = x1x2()
    cs = build_psd_pair_system(p)
    plus = ExactMatrix(
        [[Fraction(1), Fraction(1, 2)], [Fraction(1, 2), Fraction(0)]]
    )
    minus = ExactMatrix([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]])
    assert gram_expand(cs, (plus, minus)) == p
    assert check_solution(cs, (plus, minus))


def test_pair_system_requires_symmetry():
    cs = build_psd_pair_system(x1x2())
    skew = ExactMatrix([[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]])
    with pytest.raises(ValueError):
        check_solution(cs, (skew, skew))
