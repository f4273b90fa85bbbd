"""Problem construction from files and seeded generators; trace files.

Synthetic data uses xoshiro256** (state seeded through SplitMix64) for the
raw 64-bit stream, 53-bit uniform doubles ``(x >> 11) * 2**-53`` and the
Box-Muller transform. X is filled column by column, then y.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from .cd import IterationTrace, TraceRow
from .errors import ParseError, ZeroColumnError

log = logging.getLogger(__name__)

MAX_DENSE_ENTRIES = 10**8
_MASK64 = (1 << 64) - 1


# --- libsvm -------------------------------------------------------------------


@dataclass
class LibsvmData:
    labels: np.ndarray
    rows: list  # one (indices, values) pair per sample; indices are 1-based

    @property
    def n(self):
        return len(self.rows)

    @property
    def max_index(self):
        return max((int(idx[-1]) for idx, _ in self.rows if len(idx)), default=0)

    def to_dense(self, p=None):
        p = self.max_index if p is None else int(p)
        if p < self.max_index:
            raise ValueError(f"p={p} is smaller than the largest feature index {self.max_index}")
        if self.n * p > MAX_DENSE_ENTRIES:
            raise ValueError(f"dense {self.n}x{p} matrix exceeds {MAX_DENSE_ENTRIES} entries")
        X = np.zeros((self.n, p), order="F")
        for i, (idx, vals) in enumerate(self.rows):
            X[i, np.asarray(idx, dtype=np.intp) - 1] = vals
        return X


def read_libsvm(path):
    """Parse ``label idx:val ...`` lines (1-based, strictly ascending indices)."""
    path = Path(path)
    labels = []
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                label = float(parts[0])
            except ValueError:
                raise ParseError(f"bad label {parts[0]!r}", path, lineno) from None
            idx = []
            vals = []
            last = 0
            for tok in parts[1:]:
                key, sep, val = tok.partition(":")
                if not sep:
                    raise ParseError(f"expected idx:val, got {tok!r}", path, lineno)
                try:
                    i = int(key)
                    v = float(val)
                except ValueError:
                    raise ParseError(f"bad feature {tok!r}", path, lineno) from None
                if i <= 0:
                    raise ParseError(f"nonpositive index {i}", path, lineno)
                if i <= last:
                    raise ParseError(f"descending or repeated index {i} after {last}", path, lineno)
                if not math.isfinite(v):
                    raise ParseError(f"non-finite value in {tok!r}", path, lineno)
                idx.append(i)
                vals.append(v)
                last = i
            labels.append(label)
            rows.append((np.array(idx, dtype=np.int64), np.array(vals)))
    return LibsvmData(np.array(labels), rows)


def write_libsvm(path, X, y):
    X = np.asarray(X)
    with open(path, "w") as fh:
        for row, label in zip(X, y):
            feats = " ".join(f"{j + 1}:{v:.17g}" for j, v in enumerate(row) if v != 0.0)
            fh.write(f"{label:.17g} {feats}".rstrip() + "\n")


# --- CSV ----------------------------------------------------------------------


def _read_numeric_csv(path):
    path = Path(path)
    out = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                vals = [float(cell) for cell in row]
            except ValueError:
                raise ParseError("non-numeric cell", path, lineno) from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(f"ragged row: {len(vals)} cells, expected {width}", path, lineno)
            out.append(vals)
    if not out:
        raise ParseError("empty file", path)
    arr = np.array(out, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ParseError("non-finite value", path)
    return arr


def read_dense_csv(path_X, path_y=None):
    """Read X and y from CSV.

    With ``path_y`` None the last column of ``path_X`` is the response;
    otherwise ``path_y`` holds y as a single column (or a single row).
    Returns ``(X, y)`` as arrays; rejects zero columns.
    """
    A = _read_numeric_csv(path_X)
    if path_y is None:
        if A.shape[1] < 2:
            raise ParseError("need at least one feature column plus the response column", path_X)
        X, y = A[:, :-1], A[:, -1]
    else:
        X = A
        y = _read_numeric_csv(path_y).ravel()
        if y.shape[0] != X.shape[0]:
            raise ParseError(f"response has {y.shape[0]} entries, X has {X.shape[0]} rows", path_y)
    zero = np.flatnonzero(~np.any(X != 0.0, axis=0))
    if zero.size:
        raise ZeroColumnError(f"{path_X}: zero column(s) at index {zero.tolist()}")
    return np.asfortranarray(X), y


def write_dense_csv(path, A):
    """Write a matrix (or a vector, as one column) with 17 significant digits."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in A:
            w.writerow([f"{v:.17g}" for v in row])


def load_problem_arrays(path, response=None, p=None):
    """X, y from a CSV or libsvm file (chosen by extension)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_dense_csv(path, response)
    data = read_libsvm(path)
    X = data.to_dense(p)
    zero = np.flatnonzero(~np.any(X != 0.0, axis=0))
    if zero.size:
        raise ZeroColumnError(f"{path}: zero column(s) at index {zero.tolist()}; pass a smaller p or drop them")
    return X, data.labels


def normalize_columns(X):
    """Scale every column to unit Euclidean norm."""
    X = np.asarray(X, dtype=np.float64)
    return np.asfortranarray(X / np.linalg.norm(X, axis=0))


def bundled_example_path():
    return Path(__file__).with_name("data") / "paper_example.csv"


# --- seeded generator -----------------------------------------------------------


def splitmix64(state):
    """One SplitMix64 step on a Python int; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def xoshiro_state(seed):
    """256-bit xoshiro state from a 64-bit seed via SplitMix64."""
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    words = []
    s = seed
    for _ in range(4):
        s, out = splitmix64(s)
        words.append(out)
    return np.array(words, dtype=np.uint64)


@numba.njit(cache=True)
def _rotl(x, k):
    return (x << numba.uint64(k)) | (x >> numba.uint64(64 - k))


@numba.njit(cache=True)
def _xoshiro_fill(state, out):
    s0, s1, s2, s3 = state[0], state[1], state[2], state[3]
    for i in range(out.shape[0]):
        out[i] = _rotl(s1 * numba.uint64(5), 7) * numba.uint64(9)
        t = s1 << numba.uint64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
    state[0], state[1], state[2], state[3] = s0, s1, s2, s3


class Xoshiro256:
    """xoshiro256** with Box-Muller Gaussians; fully determined by the seed."""

    def __init__(self, seed):
        self.state = xoshiro_state(seed)

    @classmethod
    def from_state(cls, words):
        obj = cls.__new__(cls)
        obj.state = np.array(words, dtype=np.uint64)
        return obj

    def raw(self, count):
        out = np.empty(count, dtype=np.uint64)
        _xoshiro_fill(self.state, out)
        return out

    def uniform(self, count):
        """Doubles in [0, 1) with 53 random bits."""
        return (self.raw(count) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def standard_normal(self, count):
        pairs = (count + 1) // 2
        u = self.uniform(2 * pairs)
        u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
        u2 = u[1::2]
        rad = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = rad * np.cos(2.0 * np.pi * u2)
        z[1::2] = rad * np.sin(2.0 * np.pi * u2)
        return z[:count]


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    p: int
    seed: int = 0
    distribution: str = "standard_gaussian"

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if self.distribution != "standard_gaussian":
            raise ValueError(f"unsupported distribution {self.distribution!r}")


def synth(spec):
    """Gaussian X (n x p) and y (n) from ``spec``; same spec, same bytes."""
    rng = Xoshiro256(spec.seed)
    X = rng.standard_normal(spec.n * spec.p).reshape((spec.n, spec.p), order="F")
    y = rng.standard_normal(spec.n)
    for j in np.flatnonzero(~np.any(X != 0.0, axis=0)):
        log.warning("synthetic column %d came out all zero; regenerating it", j)
        while not np.any(X[:, j] != 0.0):
            X[:, j] = rng.standard_normal(spec.n)
    return X, y


# --- traces ---------------------------------------------------------------------

TRACE_FIELDS = ("k", "f", "alpha", "step_norm", "sparsity")


def _num(v):
    return "" if v is None else f"{v:.17g}"


def write_trace(trace, path, fmt=None):
    """Write one record per sweep as CSV or JSON lines.

    The CSV starts with a ``# {...}`` metadata line (variant, lambda)
    followed by the column header.
    """
    path = Path(path)
    fmt = fmt or ("json_lines" if path.suffix.lower() in (".jsonl", ".json") else "csv")
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "csv":
                meta = {"variant": trace.variant, "lambda": _num(trace.lam)}
                fh.write("# " + json.dumps(meta) + "\n")
                fh.write(",".join(TRACE_FIELDS) + "\n")
                for row in trace.rows:
                    fh.write(
                        f"{row.k},{_num(row.f)},{_num(row.alpha)},{_num(row.step_norm)},{_num(row.sparsity)}\n"
                    )
            elif fmt == "json_lines":
                for row in trace.rows:
                    rec = {
                        "k": row.k,
                        "f": row.f,
                        "alpha": row.alpha,
                        "step_norm": row.step_norm,
                        "sparsity": row.sparsity,
                    }
                    fh.write(json.dumps(rec) + "\n")
            else:
                raise ValueError(f"unknown trace format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc.strerror}") from exc


def read_trace(path, fmt=None):
    path = Path(path)
    fmt = fmt or ("json_lines" if path.suffix.lower() in (".jsonl", ".json") else "csv")
    trace = IterationTrace(variant="unknown", lam=float("nan"))
    with open(path) as fh:
        if fmt == "csv":
            header_seen = False
            for line in fh:
                line = line.rstrip("\n")
                if line.startswith("#"):
                    meta = json.loads(line[1:])
                    trace.variant = meta.get("variant", trace.variant)
                    if meta.get("lambda") not in (None, ""):
                        trace.lam = float(meta["lambda"])
                    continue
                if not header_seen:
                    if tuple(line.split(",")) != TRACE_FIELDS:
                        raise ParseError(f"unexpected trace header {line!r}", path)
                    header_seen = True
                    continue
                if not line:
                    continue
                k, f, alpha, step, sp = line.split(",")
                trace.rows.append(
                    TraceRow(int(k), float(f), float(alpha) if alpha else None, float(step), float(sp))
                )
        else:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    trace.rows.append(TraceRow(**{k: rec[k] for k in TRACE_FIELDS}))
    return trace
