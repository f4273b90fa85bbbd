"""Iteration counts on real libsvm data sets supplied by the user.

The data is not bundled. Download e.g. the leukemia, colon-cancer and
gisette files from the LIBSVM data collection and pass their paths:

    python scripts/bench_libsvm.py leu colon-cancer gisette_scale [--normalize]

Each file is solved once per ratio (no repeats); labels are used as y.
Columns that are entirely zero are dropped before solving.
"""

import argparse
from pathlib import Path

import numpy as np

from srrlasso.bench import BenchProtocol, BenchSource, default_jobs, run_bench
from srrlasso.ingest import normalize_columns, read_libsvm


def load(path, normalize):
    data = read_libsvm(path)
    X = data.to_dense()
    keep = np.any(X != 0.0, axis=0)
    if not keep.all():
        print(f"{path}: dropping {int((~keep).sum())} all-zero columns")
        X = np.asfortranarray(X[:, keep])
    if normalize:
        X = normalize_columns(X)
    return X, data.labels


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("files", nargs="+", type=Path)
    ap.add_argument("--normalize", action="store_true", help="scale columns to unit norm")
    ap.add_argument("--jobs", type=int, default=default_jobs())
    ap.add_argument("--out", help="CSV output path")
    args = ap.parse_args()

    proto = BenchProtocol(repeats=1)
    sources = [BenchSource.from_arrays(path.name, *load(path, args.normalize)) for path in args.files]
    table = run_bench(sources, proto, jobs=args.jobs)
    print(table.format_text())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table.format_csv())


if __name__ == "__main__":
    main()
