"""Command line entry point: ``skelbary <subcommand> ...``.

Exit codes: 0 success, 1 a skeleton-barycenter guarantee was violated,
2 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from .exact import combination, format_rational, parse_rational, parse_vector
from .experiments import (GENERATORS, ExperimentSpec, generate, probe_infeasible,
                          run_theorem_sweep)
from .polytope import carrier_face, contains, polytope_from_json, translate
from .solver import (DecompositionRequest, DecompositionWitness, Part, check_witness,
                     decompose, verify_dimension_inequality)
from .testmap import evaluate_phi

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _range(text: str) -> tuple:
    lo, _, hi = text.partition(":")
    try:
        return int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use a or a:b") from None


def _parts(text: str) -> list:
    parts = []
    for item in text.split(","):
        k, _, lam = item.partition(":")
        parts.append(Part(int(k), parse_rational(lam)))
    return parts


def _load_polytope(args):
    if args.polytope:
        with open(args.polytope) as fh:
            return polytope_from_json(fh.read())
    if args.generator:
        if args.dim is None:
            raise InputError("--generator needs --dim")
        return generate(args.generator, args.dim, args.seed)
    raise InputError("give --polytope FILE or --generator/--dim")


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_polytope_args(p):
    p.add_argument("--polytope", metavar="FILE", help="polytope JSON")
    p.add_argument("--generator", choices=GENERATORS)
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE")


def cmd_build(args) -> int:
    poly = _load_polytope(args)
    summary = {
        "name": poly.name,
        "dim": poly.dim,
        "ambient_dim": poly.ambient_dim,
        "f_vector": list(poly.f_vector()),
        "vertices": [[format_rational(c) for c in v] for v in poly.vertices],
        "facets": [{"normal": [format_rational(c) for c in a], "offset": format_rational(b)}
                   for a, b in poly.facets],
    }
    _emit(json.dumps(summary, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    poly = _load_polytope(args)
    target = parse_vector(args.point)
    if args.parts:
        req = DecompositionRequest(poly, target, tuple(_parts(args.parts)))
    else:
        if args.n is None or args.k is None:
            raise InputError("give --n and --k, or --parts")
        req = DecompositionRequest.homogeneous(poly, target, args.n, args.k)
    if not contains(poly, req.target):
        raise InputError("--point is not in the polytope")
    out = decompose(req, strategy=args.strategy, parallel=args.parallel)
    if isinstance(out, DecompositionWitness):
        data = out.to_dict()
        data["valid"] = check_witness(req, out)
        _emit(json.dumps(data) + "\n", args.out)
        return EXIT_OK if data["valid"] else EXIT_VIOLATION
    _emit(json.dumps(out.to_dict()) + "\n", args.out)
    if req.is_homogeneous:
        k = req.parts[0].skeleton_dim
        if k * req.n >= carrier_face(poly, req.target).dim:
            return EXIT_VIOLATION
    return EXIT_OK


def _spec(args) -> ExperimentSpec:
    return ExperimentSpec(args.generator, args.dim, args.n, args.k, args.trials, args.seed)


def cmd_verify_theorem(args) -> int:
    report = run_theorem_sweep(_spec(args), parallel=args.parallel)
    _emit(report.to_csv(timing=not args.no_timing), args.out)
    print(json.dumps(report.summary()), file=sys.stderr)
    return EXIT_VIOLATION if report.violation_count else EXIT_OK


def cmd_probe_infeasible(args) -> int:
    report = probe_infeasible(_spec(args), parallel=args.parallel)
    _emit(report.to_csv(timing=not args.no_timing), args.out)
    anomalies = [r for r in report.rows if r["status"] == "feasible"]
    for r in anomalies:
        print(f"anomaly: feasible draw trial={r['trial']} n={r['n']} k={r['k']} "
              f"witness={r['witness']}", file=sys.stderr)
    print(json.dumps(report.summary()), file=sys.stderr)
    return EXIT_OK


def cmd_testmap(args) -> int:
    poly = _load_polytope(args)
    points = [parse_vector(chunk) for chunk in args.points.split(";")]
    ev = evaluate_phi(points, poly, args.k)
    _emit(json.dumps(ev.to_dict()) + "\n", args.out)
    return EXIT_OK


def cmd_dim_check(args) -> int:
    poly = _load_polytope(args)
    origin = (Fraction(0),) * poly.ambient_dim
    if not contains(poly, origin) or carrier_face(poly, origin) != poly.full:
        n_v = len(poly.vertices)
        center = combination([Fraction(1, n_v)] * n_v, list(poly.vertices))
        poly = translate(poly, tuple(-c for c in center))
    report = verify_dimension_inequality(poly, args.n, args.k)
    _emit(json.dumps(report.to_dict()) + "\n", args.out)
    return EXIT_VIOLATION if report.violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skelbary",
                                     description="Barycenters of points on polytope skeleta.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="polytope JSON -> face lattice summary")
    _add_polytope_args(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("decompose", help="find points on skeleta with a given barycenter")
    _add_polytope_args(p)
    p.add_argument("--point", required=True, help='target, e.g. "1/2,0"')
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--parts", help='heterogeneous parts "k:weight,..."')
    p.add_argument("--strategy", choices=("direct", "factored"), default="direct")
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_decompose)

    for name, func, default_gen in (("verify-theorem", cmd_verify_theorem, "cube"),
                                    ("probe-infeasible", cmd_probe_infeasible, "random_hull")):
        p = sub.add_parser(name)
        p.add_argument("--generator", choices=GENERATORS, default=default_gen)
        p.add_argument("--dim", type=int, required=True)
        p.add_argument("--n", type=_range, required=True, help="n or lo:hi")
        p.add_argument("--k", type=_range, required=True, help="k or lo:hi")
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--parallel", action="store_true")
        p.add_argument("--no-timing", action="store_true",
                       help="blank the elapsed_ms column for byte-stable output")
        p.add_argument("--out", metavar="FILE")
        p.set_defaults(func=func)

    p = sub.add_parser("testmap", help="distances to the k-skeleton and their mean-free part")
    _add_polytope_args(p)
    p.add_argument("--points", required=True, help='"x1,x2;y1,y2;..."')
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_testmap)

    p = sub.add_parser("dim-check", help="face-dimension inequality over tuples of big faces")
    _add_polytope_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_dim_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
