"""Floating-point certificates for rank lower bounds.

The sum of the l smallest eigenvalues of a symmetric matrix, mu_l, is a
concave function of the matrix, and for any symmetric Y, mu_l(Y) > 0
forces at least n - l + 1 nonzero eigenvalues, hence rank(Y) > n - l.
Minimizing a concave function over a polytope lands on a vertex, so
checking mu at the vertices of an outer approximation of a solution set
certifies a rank lower bound over the whole set.  This module provides
the eigenvalue machinery (a cyclic Jacobi solver, kept independent of
numpy.linalg so the latter can serve as a cross-check), the mu/PSD
helpers, dual certificates that witness a value of mu, and the vertex
certification entry points.

Every acceptance threshold is relative: tolerances scale with the max
absolute entry of the matrices involved, never with fixed absolute
cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from birank.exactla import ExactMatrix


def to_float_array(m) -> np.ndarray:
    """Square float64 array from an ExactMatrix, nested sequences, or an
    ndarray."""
    if isinstance(m, ExactMatrix):
        rows = [[float(v) for v in row] for row in m.to_lists()]
        a = np.array(rows, dtype=float)
    else:
        a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def sym_part(m) -> np.ndarray:
    a = to_float_array(m)
    return (a + a.T) / 2.0


def norm_scale(a) -> float:
    """Relative-tolerance scale: max absolute entry, floored at 1."""
    a = to_float_array(a)
    return max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)


def jacobi_eigh(m, rel_tol: float = 1e-12, max_sweeps: int = 100):
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a
    symmetric matrix, by cyclic Jacobi rotations.

    Sweeps rotate every off-diagonal plane; convergence is reached when
    the off-diagonal Frobenius norm drops below rel_tol times the entry
    scale of the input.  Raises ArithmeticError if max_sweeps sweeps do
    not converge (symmetric input always converges long before that).
    """
    a = sym_part(m)
    n = a.shape[0]
    v = np.eye(n)
    scale = norm_scale(a)
    if n < 2:
        return a.diagonal().copy(), v
    for _ in range(max_sweeps):
        # Summing the squared total and subtracting the diagonal cancels
        # catastrophically near convergence; sum the off-diagonal directly.
        offdiag = a.copy()
        np.fill_diagonal(offdiag, 0.0)
        off = math.sqrt(float(np.sum(offdiag * offdiag)))
        if off <= rel_tol * scale:
            break
        skip = rel_tol * scale / (n * n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    vals = a.diagonal().copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def eigenvalues(m) -> np.ndarray:
    vals, _ = jacobi_eigh(m)
    return vals


def mu(m, l: int) -> float:
    """Sum of the l smallest eigenvalues; concave in the matrix."""
    a = sym_part(m)
    n = a.shape[0]
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= {n}")
    if l == 0:
        return 0.0
    return float(np.sum(eigenvalues(a)[:l]))


def psd_check(m, tol: float = 1e-9) -> bool:
    """True when the smallest eigenvalue clears -tol times the entry
    scale."""
    a = sym_part(m)
    if a.shape[0] == 0:
        return True
    return float(eigenvalues(a)[0]) >= -tol * norm_scale(a)


@dataclass(frozen=True)
class DualCertificate:
    """Witness for a lower bound on mu_l: a shift z and a matrix zmat with
    zmat PSD and Y + zmat - z*I PSD, giving mu_l(Y) >= l*z - tr(zmat)
    up to the checker's slack."""

    l: int
    z: float
    zmat: Tuple[Tuple[float, ...], ...]

    @property
    def bound(self) -> float:
        return self.l * self.z - float(np.trace(np.array(self.zmat)))


def dual_from_eigs(m, l: int) -> DualCertificate:
    """The certificate attaining mu_l exactly: z is the l-th smallest
    eigenvalue and zmat collects the deficits of the eigenvalues below
    it."""
    a = sym_part(m)
    n = a.shape[0]
    if not 1 <= l <= n:
        raise ValueError(f"need 1 <= l <= {n}")
    vals, vecs = jacobi_eigh(a)
    z = float(vals[l - 1])
    deficits = np.maximum(0.0, z - vals)
    zmat = (vecs * deficits) @ vecs.T
    zmat = (zmat + zmat.T) / 2.0
    return DualCertificate(l=l, z=z, zmat=tuple(tuple(float(x) for x in row) for row in zmat))


def check_dual(m, cert: DualCertificate, tol: float = 1e-9):
    """Validate a dual certificate against Y and return
    (accepted, certified_bound, slack).

    Acceptance checks both PSD conditions to within -tol*scale; the
    certified statement is then mu_l(Y) >= bound - slack with
    slack = n * tol * scale.
    """
    y = sym_part(m)
    n = y.shape[0]
    if cert.l < 1 or cert.l > n:
        return False, -math.inf, 0.0
    zmat = sym_part(np.array(cert.zmat))
    if zmat.shape != y.shape:
        return False, -math.inf, 0.0
    scale = max(norm_scale(y), norm_scale(zmat), abs(cert.z), 1.0)
    slack = n * tol * scale
    ok_z = float(eigenvalues(zmat)[0]) >= -tol * scale
    shifted = y + zmat - cert.z * np.eye(n)
    ok_shift = float(eigenvalues(shifted)[0]) >= -tol * scale
    return ok_z and ok_shift, cert.bound, slack


@dataclass(frozen=True)
class OuterApproxCertificate:
    """Result of vertex certification: the claimed rank bound holds for
    every matrix in the convex hull of the supplied vertices, provided the
    solution set is contained in that hull (an input assumption this
    module records but cannot check)."""

    r: int
    l: int
    vertex_mu: Tuple[float, ...]
    threshold: float
    margin: float
    accepted: bool

    @property
    def certified_lower_bound(self) -> int:
        return self.r + 1 if self.accepted else 0


def certify_minrank(vertices: Sequence, r: int, tol: float = 1e-9) -> OuterApproxCertificate:
    """Certify rank > r for every matrix in the hull of the given
    symmetric vertices.

    Uses l = n - r: a positive mu_l forces more than r nonzero
    eigenvalues, and concavity of mu_l pins its hull minimum to a vertex.
    Accepts when every vertex value exceeds n * tol * scale.
    """
    mats = [sym_part(v) for v in vertices]
    if not mats:
        raise ValueError("need at least one vertex")
    n = mats[0].shape[0]
    if any(a.shape[0] != n for a in mats):
        raise ValueError("vertices must share one size")
    if not 0 <= r < n:
        raise ValueError(f"need 0 <= r < {n}")
    l = n - r
    scale = max(norm_scale(a) for a in mats)
    threshold = n * tol * scale
    vertex_mu = tuple(mu(a, l) for a in mats)
    margin = min(vertex_mu) - threshold
    return OuterApproxCertificate(
        r=r, l=l, vertex_mu=vertex_mu, threshold=threshold,
        margin=margin, accepted=margin > 0,
    )


def certify_brank(pair_vertices: Sequence, r: int, tol: float = 1e-9) -> OuterApproxCertificate:
    """Same certification for pair solutions (P, N): the summed rank is
    the rank of the block-diagonal embedding, so the vertices are embedded
    into twice the size and certified there."""
    embedded = []
    for plus, minus in pair_vertices:
        a = sym_part(plus)
        b = sym_part(minus)
        if a.shape != b.shape:
            raise ValueError("pair blocks must share one size")
        n = a.shape[0]
        big = np.zeros((2 * n, 2 * n))
        big[:n, :n] = a
        big[n:, n:] = b
        embedded.append(big)
    return certify_minrank(embedded, r, tol)


def certificate_to_json(cert: OuterApproxCertificate) -> dict:
    return {
        "r": cert.r,
        "l": cert.l,
        "vertex_mu": list(cert.vertex_mu),
        "threshold": cert.threshold,
        "margin": cert.margin,
        "accepted": cert.accepted,
        "certified_lower_bound": cert.certified_lower_bound,
        "assumes_hull_containment": True,
    }


def dual_to_json(cert: DualCertificate) -> dict:
    return {
        "l": cert.l,
        "z": cert.z,
        "zmat": [list(row) for row in cert.zmat],
        "bound": cert.bound,
    }


def dual_from_json(obj) -> DualCertificate:
    return DualCertificate(
        l=int(obj["l"]),
        z=float(obj["z"]),
        zmat=tuple(tuple(float(x) for x in row) for row in obj["zmat"]),
    )
