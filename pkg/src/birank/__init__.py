"""Exact workbench for bi-polynomial rank and determinantal-complexity bounds.

The package is organized in layers: `polyring` (exact sparse polynomials),
`exactla` (rational matrices, signatures, affine normal forms), `permhess`
(permanent Hessians at the singular expansion point), `rankmin` (Gram
constraint systems and minrank intervals), `abpdec` (clow-sequence
determinant programs and certified product-sum decompositions), `certify`
(floating-point eigenvalue certificates), and `cli`.
"""

from birank.abpdec import (
    BiDecomposition,
    char_coefficients,
    dc_lower_bound,
    dc_sqrt_bound,
    decompose_from_representation,
    generic_birank_floor,
)
from birank.certify import certify_brank, certify_minrank, jacobi_eigh, mu
from birank.exactla import (
    AffineMatrixPoly,
    ExactMatrix,
    Signature,
    rank_exact,
    signature_exact,
    singular_normal_form,
)
from birank.permhess import hessian, hessian_perm_fast, hessian_report, perm_zero_point
from birank.polyring import (
    Polynomial,
    det_poly,
    homogeneous_part,
    monomial_index_set,
    monomial_split,
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
    minrank_interval,
)

__all__ = [
    "AffineMatrixPoly",
    "BiDecomposition",
    "ConstraintSystem",
    "ExactMatrix",
    "Polynomial",
    "Signature",
    "build_affine_system",
    "build_psd_pair_system",
    "build_sym_system",
    "build_z2k",
    "certify_brank",
    "certify_minrank",
    "char_coefficients",
    "dc_lower_bound",
    "dc_sqrt_bound",
    "decompose_from_representation",
    "det_poly",
    "generic_birank_floor",
    "hessian",
    "hessian_perm_fast",
    "hessian_report",
    "homogeneous_part",
    "jacobi_eigh",
    "minrank_interval",
    "monomial_index_set",
    "monomial_split",
    "mu",
    "perm_poly",
    "perm_zero_point",
    "point",
    "rank_exact",
    "shift",
    "signature_exact",
    "singular_normal_form",
]
