"""Iteration tables, counts and spectra for the bundled 5 x 5 example (lambda = 0).

    python scripts/small_example.py [--out-dir traces/]
"""

import argparse
from pathlib import Path

import numpy as np

from srrlasso import Problem, SolverConfig, ray_alpha_estimate, solve
from srrlasso.ingest import bundled_example_path, read_dense_csv, write_trace
from srrlasso.spectral import eigenvalues, gauss_seidel_matrix, ldu_split, srrc_factor_products


def show_rows(title, res, ks):
    print(f"\n{title}")
    print(f"{'k':>4} " + " ".join(f"{'beta_' + str(i + 1):>10}" for i in range(5)) + f" {'f':>12} {'alpha':>10}")
    for k in ks:
        if k > len(res.trace):
            continue
        row, beta = res.trace.rows[k - 1], res.trace.iterates[k - 1]
        alpha = "" if row.alpha is None else f"{row.alpha:10.6f}"
        print(f"{k:>4} " + " ".join(f"{b:10.6f}" for b in beta) + f" {row.f:12.4e} {alpha:>10}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, help="also write CSV traces here")
    args = ap.parse_args()

    X, y = read_dense_csv(bundled_example_path())
    prob = Problem(X, y, 0.0)
    runs = {
        v: solve(prob, SolverConfig(v, step_tol=None, target_objective=1e-8, trace=True))
        for v in ("cd", "srrc", "srrt")
    }
    show_rows("CD", runs["cd"], [1, 2, 3, 4, 5, 10, 28, 29, 30, 100, 103])
    show_rows("CD+SRRC", runs["srrc"], range(1, 17))
    show_rows("CD+SRRT", runs["srrt"], range(1, 31))

    it = [np.zeros(5)] + runs["cd"].trace.iterates
    print("\nper-coordinate ray factors of the CD iterates")
    for k in range(2, 6):
        a = ray_alpha_estimate(it[k - 1], it[k], it[k + 1])
        print(f"{k:>4} " + " ".join(f"{v:10.6f}" for v in a.filled(np.nan)))

    print("\nsweeps to reach f <= target   CD  SRRC  SRRT")
    for target in (1e-3, 1e-4, 1e-8):
        counts = [
            solve(prob, SolverConfig(v, step_tol=None, target_objective=target)).sweeps for v in ("cd", "srrc", "srrt")
        ]
        print(f"{target:>26g} {counts[0]:>4} {counts[1]:>5} {counts[2]:>5}")

    ev = eigenvalues(gauss_seidel_matrix(ldu_split(X)))
    print("\neigenvalues of -(L+D)^-1 U:", " ".join(f"{z.real:.8f}" for z in ev))
    srrc30 = solve(prob, SolverConfig("srrc", step_tol=None, max_sweeps=30))
    t_cd = srrc_factor_products(ev, np.ones(29))[28, -1]
    t_srrc = srrc_factor_products(ev, srrc30.trace.refinement_factors())[28, -1]
    print(f"t_5^29: CD {t_cd:.6f}, SRRC {t_srrc:.6f}")

    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        for v, res in runs.items():
            write_trace(res.trace, args.out_dir / f"example_{v}.csv")
        print(f"\ntraces written to {args.out_dir}/")


if __name__ == "__main__":
    main()
