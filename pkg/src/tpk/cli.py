"""Command-line front end.

Subcommands: ``gen``, ``decompose``, ``angle``, ``verify``, ``resolvent``
and ``counterexample``. JSON goes to stdout unless an output path is given.
"""

import argparse
import json
import sys

from .errors import IoError, NoConvergence, TPKError
from .friedrichs import verify_norm_equation
from .halmos import halmos_decompose
from .linalg import gap
from .io import dumps, halmos_to_json, load_pair, pair_from_json, pair_to_json
from .resolvent import N_MAX, intersection_projector_iterative
from .sampling import PairSpec, generate_pair
from .subspaces import intersect_ranges
from .suites import COUNTEREXAMPLE_GRIDS, SUITES, run_suite

__all__ = ["main", "build_parser"]

SUITE_NAMES = sorted(list(SUITES) + ["counterexample"])


def _write(text, path=None):
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
        return
    try:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def _read_pair(path):
    try:
        return load_pair(path)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise IoError(f"{path} is not valid JSON: {exc}") from None


def _read_pairs(path):
    """One pair object, or a JSON list of them."""
    try:
        fh = sys.stdin if path == "-" else open(path)
        with fh:
            obj = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise IoError(f"{path} is not valid JSON: {exc}") from None
    items = obj if isinstance(obj, list) else [obj]
    return [pair_from_json(item) for item in items]


def cmd_gen(args):
    spec = PairSpec(args.dim, args.rank_p, args.rank_q, args.shared_rank, args.seed)
    p, q = generate_pair(spec)
    _write(dumps(pair_to_json(p, q, spec)), args.out)
    return 0


def cmd_decompose(args):
    p, q = _read_pair(args.input)
    _write(dumps(halmos_to_json(halmos_decompose(p, q))), args.out)
    return 0


def cmd_angle(args):
    p, q = _read_pair(args.input)
    _write(dumps(verify_norm_equation(p, q).to_dict()), args.out)
    return 0


def cmd_verify(args):
    pairs = _read_pairs(args.input) if args.input else None
    grids = tuple(args.grid) if args.grid else None
    report = run_suite(
        args.suite,
        dim=args.dim,
        trials=args.trials,
        seed=args.seed,
        tol_scale=args.tol,
        pairs=pairs,
        grids=grids,
    )
    _write(dumps(report.to_dict(include_time=not args.no_time)), args.report)
    if not report.passed:
        print(f"FAIL {report.suite}: {', '.join(report.failures())}", file=sys.stderr)
        return 1
    return 0


def cmd_resolvent(args):
    p, q = _read_pair(args.input)
    status = 0
    try:
        proj, trace = intersection_projector_iterative(p, q, tol=args.tol, n_max=args.n_max)
    except NoConvergence as exc:
        trace, proj, status = exc.trace, exc.trace.final_projector, 1
        print(f"warning: {exc}", file=sys.stderr)
    if args.trace:
        try:
            trace.to_csv(args.trace)
        except OSError as exc:
            raise IoError(f"cannot write {args.trace}: {exc}") from None
    last = trace.records[-1]
    summary = {
        "converged": trace.converged,
        "n_final": last.n,
        "err_to_oracle": last.err_to_oracle,
        "rank": proj.rank(),
        "projector_gap_to_oracle": gap(proj, intersect_ranges(p, q)),
        "max_norm_b": trace.max_norm_b(),
    }
    _write(dumps(summary), args.out)
    return status


def cmd_counterexample(args):
    grids = tuple(args.grid) if args.grid else COUNTEREXAMPLE_GRIDS
    report = run_suite("counterexample", trials=args.trials, seed=args.seed, grids=grids, tol_scale=args.tol)
    out = report.to_dict(include_time=False)
    _write(dumps(out), args.report)
    return 0 if report.passed else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="tpk", description="Numerical toolkit for pairs of orthogonal projections.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded random projector pair")
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--rank-p", type=int, required=True)
    g.add_argument("--rank-q", type=int, required=True)
    g.add_argument("--shared-rank", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("decompose", help="canonical form of a pair")
    d.add_argument("input", help="pair JSON path or - for stdin")
    d.add_argument("--out", default=None)
    d.set_defaults(func=cmd_decompose)

    a = sub.add_parser("angle", help="Friedrichs angle and norm identity of a pair")
    a.add_argument("input", help="pair JSON path or - for stdin")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_angle)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=SUITE_NAMES)
    v.add_argument("--dim", type=int, default=16)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1.0, help="multiplier applied to the default tolerances")
    v.add_argument("--input", default=None, help="pair JSON (or list of pairs) replacing random generation")
    v.add_argument("--grid", type=int, action="append", help="grid size for the counterexample suite (repeatable)")
    v.add_argument("--report", default=None, help="write the report here instead of stdout")
    v.add_argument("--no-time", action="store_true", help="omit wall time so output is byte-stable")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("resolvent", help="iterative intersection projector with a CSV trace")
    r.add_argument("input", help="pair JSON path or - for stdin")
    r.add_argument("--n-max", type=int, default=N_MAX)
    r.add_argument("--tol", type=float, default=1e-2)
    r.add_argument("--trace", default=None, help="CSV path for the per-step trace")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_resolvent)

    c = sub.add_parser("counterexample", help="grid study of the non-closed-range example")
    c.add_argument("--grid", type=int, action="append", help="number of grid nodes (repeatable)")
    c.add_argument("--trials", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=float, default=1.0)
    c.add_argument("--report", default=None, help="JSON report path (default stdout)")
    c.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TPKError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
