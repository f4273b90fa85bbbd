"""Command-line front end: ``srr-lasso {solve,bench,eigen,synth}``.

Exit codes: 0 success, 1 usage/parse/I-O error, 2 max sweeps reached
(solve) or spectral bound violated (eigen), 3 problem too large for the
dense spectral analysis.
"""

import argparse
import json
import logging
import sys


from .bench import BenchProtocol, BenchSource, lambda_from_ratio, run_bench
from .cd import SolverConfig
from .errors import SrrLassoError, UnsupportedScale
from .ingest import (
    SyntheticSpec,
    load_problem_arrays,
    normalize_columns,
    read_trace,
    synth,
    write_dense_csv,
    write_trace,
)
from .linalg import DesignMatrix, Problem
from .spectral import MAX_P, eigen_report
from .srr import solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_SCALE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 means "not converged" here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load(args):
    X, y = load_problem_arrays(args.input, getattr(args, "response", None), getattr(args, "p", None))
    if getattr(args, "normalize", False):
        X = normalize_columns(X)
    return X, y


def cmd_solve(args):
    X, y = _load(args)
    X = DesignMatrix(X)
    if args.ratio is not None:
        lam = lambda_from_ratio(X, y, args.ratio)
    else:
        lam = args.lam
    if lam < 0:
        raise UsageError("lambda must be nonnegative")
    problem = Problem(X, y, lam)
    config = SolverConfig(
        variant=args.variant,
        step_tol=args.step_tol if args.step_tol > 0 else None,
        target_objective=args.target,
        max_sweeps=args.max_sweeps,
        refine_method=args.refine,
    )
    result = solve(problem, config)
    if args.trace:
        write_trace(result.trace, args.trace)
    print(f"variant   {config.variant}")
    print(f"lambda    {lam:.17g}")
    print(f"f         {result.objective:.10e}")
    print(f"sweeps    {result.sweeps}")
    print(f"sparsity  {result.sparsity:.6f}")
    print(f"status    {result.status}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_eigen(args):
    X, _ = _load(args)
    alphas = None
    if args.alphas_from:
        trace = read_trace(args.alphas_from)
        alphas = trace.refinement_factors()
        if not alphas:
            # plain CD trace: every factor is 1
            alphas = [1.0] * max(len(trace) - 1, 0)
    try:
        report = eigen_report(X, alphas, max_p=args.max_p)
    except UnsupportedScale as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCALE
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    if not report.bound_ok:
        print(f"spectral bound violated: max |delta| = {report.max_magnitude!r}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_synth(args):
    X, y = synth(SyntheticSpec(args.n, args.p, args.seed))
    write_dense_csv(args.out_x, X)
    write_dense_csv(args.out_y, y)
    return EXIT_OK


def _shape(text):
    try:
        n, p = text.lower().split("x")
        return int(n), int(p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxP, got {text!r}") from None


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_bench(args):
    protocol = BenchProtocol(
        ratios=args.ratios,
        cd_step_tol=args.step_tol,
        repeats=args.repeats,
        variants=tuple(args.variants.split(",")),
        max_sweeps=args.max_sweeps,
        refine_method=args.refine,
        base_seed=args.base_seed,
    )
    sources = [BenchSource.synthetic(n, p, protocol.seeds()) for n, p in args.synthetic or []]
    for path in args.input or []:
        args_input = argparse.Namespace(input=path, response=None, p=None, normalize=args.normalize)
        X, y = _load(args_input)
        sources.append(BenchSource.from_arrays(str(path), X, y))
    if not sources:
        raise UsageError("bench needs --synthetic and/or --input")
    table = run_bench(sources, protocol, jobs=args.jobs)
    sys.stdout.write(table.format_text())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table.format_csv())
    return EXIT_OK if all(r.converged for r in table.runs) else EXIT_NOT_CONVERGED


def build_parser():
    parser = _Parser(prog="srr-lasso", description="Lasso by coordinate descent with successive ray refinement.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one Lasso problem")
    p.add_argument("--input", required=True, help="CSV (last column = y unless --response) or libsvm file")
    p.add_argument("--response", help="separate CSV holding y")
    p.add_argument("--p", type=int, help="number of features for libsvm input")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--ratio", type=float, help="lambda = ratio * ||X^T y||_inf")
    p.add_argument("--variant", choices=["cd", "srrc", "srrt"], default="cd")
    p.add_argument("--refine", choices=["auto", "sort", "bisection"], default="auto")
    p.add_argument("--step-tol", type=float, default=1e-6, help="0 disables the step rule")
    p.add_argument("--target", type=float, help="stop once f <= target")
    p.add_argument("--max-sweeps", type=int, default=100_000)
    p.add_argument("--trace", help="write per-sweep trace (.csv or .jsonl)")
    p.add_argument("--normalize", action="store_true", help="scale columns to unit norm")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="iteration-count benchmark")
    p.add_argument("--synthetic", type=_shape, action="append", metavar="NxP")
    p.add_argument("--input", action="append", help="CSV or libsvm data set (repeatable)")
    p.add_argument("--ratios", type=_floats, default=(0.5, 0.1, 0.05, 0.01))
    p.add_argument("--variants", default="cd,srrc,srrt")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--step-tol", type=float, default=1e-6)
    p.add_argument("--max-sweeps", type=int, default=100_000)
    p.add_argument("--refine", choices=["auto", "sort", "bisection"], default="auto")
    p.add_argument("--jobs", type=int, default=None, help="parallel cells (default $SRR_LASSO_JOBS or 1)")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out", help="write the table as CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eigen", help="Gauss-Seidel spectrum and SRRC factor products (lambda = 0)")
    p.add_argument("--input", required=True)
    p.add_argument("--response")
    p.add_argument("--p", type=int)
    p.add_argument("--alphas-from", help="trace file whose alpha column feeds the products")
    p.add_argument("--max-p", type=int, default=MAX_P)
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("synth", help="write a seeded Gaussian problem as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-x", required=True)
    p.add_argument("--out-y", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SrrLassoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
