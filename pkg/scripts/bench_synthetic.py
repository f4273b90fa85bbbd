"""Synthetic iteration-count benchmark over the three Gaussian shapes.

Runs CD to a 1e-6 step tolerance, then CD+SRRC and CD+SRRT until they match
CD's objective, for r in {0.5, 0.1, 0.05, 0.01} and 10 seeds per shape.
Exact counts depend on the random generator; compare trends across ratios.

    python scripts/bench_synthetic.py [--repeats 10] [--jobs 4] [--out synthetic.csv]
"""

import argparse
import time

from srrlasso.bench import BenchProtocol, BenchSource, default_jobs, run_bench

SHAPES = ((500, 1000), (1000, 1000), (1000, 500))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--base-seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    ap.add_argument("--out", help="CSV output path")
    args = ap.parse_args()

    proto = BenchProtocol(repeats=args.repeats, base_seed=args.base_seed)
    sources = [BenchSource.synthetic(n, p, proto.seeds()) for n, p in SHAPES]
    start = time.perf_counter()
    table = run_bench(sources, proto, jobs=args.jobs)
    print(table.format_text())
    print(f"elapsed {time.perf_counter() - start:.1f}s")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table.format_csv())


if __name__ == "__main__":
    main()
