"""Command-line front end.

Subcommands wire the library pipelines into scriptable JSON reports:

  hessian         exact rank/signature report for the permanent's Hessian
  build           emit a Gram constraint system (xp, sym, psd-pair, z2k)
  decompose       bi-homogeneous decomposition from a determinantal
                  representation, with the pair-count bound report
  mv-det          characteristic-coefficient polynomials of a linear matrix
  brank-interval  certified rank interval over a constraint system
  certify         vertex certification of a rank lower bound (exit 2 on
                  a rejected certificate)
  bounds          determinantal-complexity bound calculators

All output is canonical JSON (sorted keys, two-space indent), so identical
inputs and seeds produce byte-identical files.  Exit codes: 0 success or
accepted certificate, 2 rejected certificate, 1 any error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from birank import abpdec, certify, exactla, permhess, polyring, rankmin


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; route through our own error
    # handling so usage problems exit 1 and code 2 stays reserved for
    # rejected certificates.
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for one subcommand invocation."""

    subcommand: str
    d: Optional[int] = None
    k: Optional[int] = None
    r: Optional[int] = None
    poly_path: Optional[str] = None
    matrix_path: Optional[str] = None
    vertices_path: Optional[str] = None
    out_path: Optional[str] = None
    export_cs: Optional[str] = None
    kind: Optional[str] = None
    x0: Optional[Tuple[Fraction, ...]] = None
    degrees: Optional[Tuple[int, ...]] = None
    tol: float = 1e-9
    budget: int = 6
    seed: int = 0
    birank: Optional[int] = None
    big_d: Optional[int] = None
    pair: bool = False
    include_matrix: bool = False


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(obj, out_path) -> None:
    text = canonical_json(obj)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}")


def _parse_point(text: str) -> Tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad point {text!r}: {exc}")


def _parse_degrees(text: str) -> Tuple[int, ...]:
    try:
        out = tuple(int(part.strip()) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad degree list {text!r}: {exc}")
    if any(v < 0 for v in out):
        raise UsageError("degrees must be nonnegative")
    return out


# ---------------------------------------------------------------------------
# Subcommand handlers.  Each validates its ranges before any heavy work.


def cmd_hessian(cfg: RunConfig) -> int:
    if cfg.d is None or cfg.d < 2:
        raise UsageError("hessian needs --d at least 2")
    if cfg.d > 10:
        raise UsageError("hessian supports --d up to 10")
    report = permhess.hessian_report(cfg.d)
    obj = permhess.report_to_json(report)
    if cfg.include_matrix:
        obj["matrix"] = exactla.matrix_to_json(permhess.hessian_perm_fast(cfg.d))
    _emit(obj, cfg.out_path)
    return 0


def _load_poly(cfg: RunConfig) -> polyring.Polynomial:
    if not cfg.poly_path:
        raise UsageError(f"--kind {cfg.kind} needs --poly FILE")
    return polyring.poly_from_json(_load_json(cfg.poly_path))


def cmd_build(cfg: RunConfig) -> int:
    if cfg.kind in ("xp", "sym", "psd-pair"):
        p = _load_poly(cfg)
        if p.degree() > 0 and p.is_homogeneous():
            k = p.degree() // 2
            size = polyring.monomial_count(p.num_vars, max(k, 1))
            if size > 60:
                raise UsageError(f"basis of {size} monomials is too large to build")
        builder = {
            "xp": rankmin.build_affine_system,
            "sym": rankmin.build_sym_system,
            "psd-pair": rankmin.build_psd_pair_system,
        }[cfg.kind]
        cs = builder(p)
    elif cfg.kind == "z2k":
        if cfg.d is None or cfg.k is None:
            raise UsageError("--kind z2k needs --d and --k")
        if cfg.d < 2 or cfg.k < 1:
            raise UsageError("z2k needs --d at least 2 and --k at least 1")
        if cfg.d > 2 * cfg.k and math.comb((cfg.d - 1) ** 2, 2 * cfg.k) > 200000:
            raise UsageError("z2k system too large for these parameters")
        cs = rankmin.build_z2k(cfg.d, cfg.k)
    else:
        raise UsageError(f"unknown build kind {cfg.kind!r}")
    _emit(rankmin.system_to_json(cs), cfg.out_path)
    return 0


def cmd_decompose(cfg: RunConfig) -> int:
    if not cfg.matrix_path or cfg.x0 is None or cfg.k is None:
        raise UsageError("decompose needs --matrix, --x0 and --k")
    if cfg.k < 1 or cfg.k > 3:
        raise UsageError("decompose supports --k between 1 and 3")
    a = exactla.affine_from_json(_load_json(cfg.matrix_path))
    if a.n > 10:
        raise UsageError("decompose supports matrices up to size 10")
    if len(cfg.x0) != a.num_vars:
        raise UsageError(f"--x0 needs {a.num_vars} coordinates")
    result = abpdec.decompose_from_representation(a, cfg.x0, cfg.k)
    obj = {
        "n": result.n,
        "num_vars": result.num_vars,
        "k": result.half_degree,
        "constant_rank": result.constant_rank,
        "pair_count": result.pair_count,
        "pair_bound": result.pair_bound,
        "decomposition": abpdec.decomposition_to_json(result.decomposition),
    }
    _emit(obj, cfg.out_path)
    return 0


def cmd_mv_det(cfg: RunConfig) -> int:
    if not cfg.matrix_path:
        raise UsageError("mv-det needs --matrix FILE")
    a = exactla.affine_from_json(_load_json(cfg.matrix_path))
    if a.n > 6:
        raise UsageError("mv-det supports matrices up to size 6")
    degrees = cfg.degrees if cfg.degrees is not None else tuple(range(a.n + 1))
    if any(v > a.n for v in degrees):
        raise UsageError(f"coefficient degrees run from 0 to {a.n}")
    coeffs = abpdec.char_coefficients(a, list(degrees))
    obj = {
        "n": a.n,
        "coefficients": {str(k): polyring.poly_to_json(v) for k, v in coeffs.items()},
    }
    _emit(obj, cfg.out_path)
    return 0


def cmd_brank_interval(cfg: RunConfig) -> int:
    if not cfg.poly_path:
        raise UsageError("brank-interval needs --poly FILE")
    p = polyring.poly_from_json(_load_json(cfg.poly_path))
    kind = cfg.kind or "xp"
    if kind not in ("xp", "sym", "psd-pair"):
        raise UsageError(f"unknown system kind {kind!r}")
    if p.is_zero() or not p.is_homogeneous() or p.degree() % 2 or p.degree() == 0:
        raise UsageError("brank-interval needs a nonzero homogeneous form of even degree")
    size = polyring.monomial_count(p.num_vars, p.degree() // 2)
    if size > 20:
        raise UsageError(f"monomial basis of {size} is too large for the interval search")
    builder = {
        "xp": rankmin.build_affine_system,
        "sym": rankmin.build_sym_system,
        "psd-pair": rankmin.build_psd_pair_system,
    }[kind]
    cs = builder(p)
    if cfg.export_cs:
        _emit(rankmin.system_to_json(cs), cfg.export_cs)
    interval = rankmin.minrank_interval(cs, budget=cfg.budget, seed=cfg.seed)
    obj = {
        "kind": kind,
        "lower": interval.lower,
        "upper": interval.upper,
        "lower_method": interval.lower_method,
        "upper_method": interval.upper_method,
        "free_dimension": interval.free_dimension,
    }
    _emit(obj, cfg.out_path)
    return 0


def cmd_certify(cfg: RunConfig) -> int:
    if not cfg.vertices_path or cfg.r is None:
        raise UsageError("certify needs --vertices FILE and --r")
    if cfg.r < 0:
        raise UsageError("--r must be nonnegative")
    data = _load_json(cfg.vertices_path)
    if not isinstance(data, dict) or "vertices" not in data:
        raise UsageError("vertices file must be an object with a 'vertices' list")
    vertices = data["vertices"]
    if not isinstance(vertices, list) or not vertices:
        raise UsageError("vertices list is empty")
    try:
        if cfg.pair:
            pairs = [(v[0], v[1]) for v in vertices]
            cert = certify.certify_brank(pairs, cfg.r, tol=cfg.tol)
        else:
            cert = certify.certify_minrank(vertices, cfg.r, tol=cfg.tol)
    except (ValueError, TypeError, IndexError) as exc:
        raise UsageError(f"bad vertices input: {exc}")
    _emit(certify.certificate_to_json(cert), cfg.out_path)
    return 0 if cert.accepted else 2


def cmd_bounds(cfg: RunConfig) -> int:
    if cfg.birank is None or cfg.k is None or cfg.big_d is None:
        raise UsageError("bounds needs --birank, --k and --D")
    if cfg.birank < 0 or cfg.k < 1 or cfg.big_d < 1:
        raise UsageError("bounds needs --birank >= 0, --k >= 1, --D >= 1")
    lower = abpdec.dc_lower_bound(cfg.birank, cfg.k, cfg.big_d)
    floor = abpdec.generic_birank_floor(cfg.big_d, cfg.k)
    obj = {
        "birank": cfg.birank,
        "k": cfg.k,
        "D": cfg.big_d,
        "dc_lower_bound": polyring.fraction_to_json(lower),
        "dc_lower_bound_float": float(lower),
        "dc_sqrt_bound": abpdec.dc_sqrt_bound(cfg.birank),
        "generic_floor": polyring.fraction_to_json(floor),
        "generic_floor_float": float(floor),
    }
    _emit(obj, cfg.out_path)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.


def build_parser() -> _Parser:
    parser = _Parser(prog="birank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    def add(name, help_text):
        # Subparsers inherit the _Parser class from the main parser, so
        # their usage errors also route through UsageError.
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", dest="out_path", help="write JSON here instead of stdout")
        return p

    p = add("hessian", "rank/signature report for the permanent's Hessian")
    p.add_argument("--d", type=int, required=True, help="matrix size, at least 2")
    p.add_argument(
        "--include-matrix", action="store_true", help="embed the full Hessian entries"
    )

    p = add("build", "emit a Gram constraint system as JSON")
    p.add_argument(
        "--kind", required=True, choices=["xp", "sym", "psd-pair", "z2k"],
        help="system flavor",
    )
    p.add_argument("--poly", dest="poly_path", help="polynomial JSON (xp/sym/psd-pair)")
    p.add_argument("--d", type=int, help="matrix size (z2k)")
    p.add_argument("--k", type=int, help="half degree (z2k)")

    p = add("decompose", "decompose a determinantal representation's slice")
    p.add_argument("--matrix", dest="matrix_path", required=True, help="affine matrix JSON")
    p.add_argument("--x0", required=True, help="comma-separated rational point")
    p.add_argument("--k", type=int, required=True, help="half degree of the slice")

    p = add("mv-det", "characteristic-coefficient polynomials of a linear matrix")
    p.add_argument("--matrix", dest="matrix_path", required=True, help="affine matrix JSON")
    p.add_argument("--degrees", help="comma-separated coefficient indices (default all)")

    p = add("brank-interval", "certified rank interval for a form's Gram systems")
    p.add_argument("--poly", dest="poly_path", required=True, help="polynomial JSON")
    p.add_argument("--kind", choices=["xp", "sym", "psd-pair"], help="system flavor")
    p.add_argument("--budget", type=int, default=6, help="max free dimension")
    p.add_argument("--seed", type=int, default=0, help="seed for random sampling")
    p.add_argument("--export-cs", dest="export_cs", help="also write the system JSON here")

    p = add("certify", "certify a rank lower bound from hull vertices")
    p.add_argument("--vertices", dest="vertices_path", required=True, help="vertices JSON")
    p.add_argument("--r", type=int, required=True, help="rank to refute")
    p.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
    p.add_argument("--pair", action="store_true", help="vertices are (plus, minus) pairs")

    p = add("bounds", "determinantal-complexity bound calculators")
    p.add_argument("--birank", type=int, required=True, help="bi-polynomial rank value")
    p.add_argument("--k", type=int, required=True, help="half degree")
    p.add_argument("--D", type=int, required=True, dest="big_d", help="number of variables")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        d=getattr(args, "d", None),
        k=getattr(args, "k", None),
        r=getattr(args, "r", None),
        poly_path=getattr(args, "poly_path", None),
        matrix_path=getattr(args, "matrix_path", None),
        vertices_path=getattr(args, "vertices_path", None),
        out_path=getattr(args, "out_path", None),
        export_cs=getattr(args, "export_cs", None),
        kind=getattr(args, "kind", None),
        x0=_parse_point(args.x0) if getattr(args, "x0", None) else None,
        degrees=_parse_degrees(args.degrees) if getattr(args, "degrees", None) else None,
        tol=getattr(args, "tol", 1e-9),
        budget=getattr(args, "budget", 6),
        seed=getattr(args, "seed", 0),
        birank=getattr(args, "birank", None),
        big_d=getattr(args, "big_d", None),
        pair=getattr(args, "pair", False),
        include_matrix=getattr(args, "include_matrix", False),
    )


_HANDLERS = {
    "hessian": cmd_hessian,
    "build": cmd_build,
    "decompose": cmd_decompose,
    "mv-det": cmd_mv_det,
    "brank-interval": cmd_brank_interval,
    "certify": cmd_certify,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
        return _HANDLERS[cfg.subcommand](cfg)
    except SystemExit as exc:  # argparse --help
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
