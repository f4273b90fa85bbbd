"""Iteration-count benchmark: CD to a step tolerance, then SRR to CD's objective."""

import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cd import SolverConfig, solve_cd
from .ingest import SyntheticSpec, synth
from .linalg import DesignMatrix, Problem
from .srr import solve

VARIANT_LABELS = {"cd": "CD", "srrc": "CD+SRRC", "srrt": "CD+SRRT"}


def lambda_from_ratio(X, y, r):
    """r * ||X^T y||_inf."""
    if not r >= 0:
        raise ValueError("ratio must be nonnegative")
    values = X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=np.float64)
    return float(r) * float(np.max(np.abs(values.T @ np.asarray(y, dtype=np.float64))))


@dataclass
class BenchProtocol:
    ratios: tuple = (0.5, 0.1, 0.05, 0.01)
    cd_step_tol: float = 1e-6
    repeats: int = 10
    variants: tuple = ("cd", "srrc", "srrt")
    max_sweeps: int = 100_000
    refine_method: str = "auto"
    base_seed: int = 0

    def __post_init__(self):
        self.ratios = tuple(float(r) for r in self.ratios)
        if not all(0.0 < r <= 1.0 for r in self.ratios):
            raise ValueError("ratios must lie in (0, 1]")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        bad = set(self.variants) - set(VARIANT_LABELS)
        if bad:
            raise ValueError(f"unknown variants {sorted(bad)}")

    def seeds(self):
        return [self.base_seed + i for i in range(self.repeats)]


@dataclass
class BenchRun:
    dataset: str
    seed: int | None
    ratio: float
    lam: float
    variant: str
    sweeps: int
    objective: float
    sparsity: float
    converged: bool


@dataclass
class BenchSource:
    """A named problem generator: ``load(seed)`` returns (X, y)."""

    name: str
    load: object
    seeds: list = field(default_factory=lambda: [None])

    @classmethod
    def synthetic(cls, n, p, seeds):
        return cls(f"synthetic n={n} p={p}", lambda seed: synth(SyntheticSpec(n, p, seed)), list(seeds))

    @classmethod
    def from_arrays(cls, name, X, y):
        return cls(name, lambda seed: (X, y), [None])


def run_cell(X, y, ratio, protocol, dataset="", seed=None):
    """All variants on one (problem, ratio), following the protocol."""
    Xd = X if isinstance(X, DesignMatrix) else DesignMatrix(X)
    lam = lambda_from_ratio(Xd, y, ratio)
    problem = Problem(Xd, y, lam)
    cd = solve_cd(problem, SolverConfig("cd", step_tol=protocol.cd_step_tol, max_sweeps=protocol.max_sweeps))
    f_star = cd.objective
    runs = []
    for variant in protocol.variants:
        if variant == "cd":
            res, ok = cd, cd.converged
        else:
            cfg = SolverConfig(
                variant,
                step_tol=None,
                target_objective=f_star,
                max_sweeps=protocol.max_sweeps,
                refine_method=protocol.refine_method,
            )
            res = solve(problem, cfg)
            ok = res.converged and res.objective <= f_star
        runs.append(BenchRun(dataset, seed, ratio, lam, variant, res.sweeps, res.objective, res.sparsity, ok))
    return runs


@dataclass
class BenchTable:
    protocol: BenchProtocol
    runs: list
    notes: list = field(default_factory=list)

    def datasets(self):
        return list(dict.fromkeys(r.dataset for r in self.runs))

    def select(self, dataset, ratio, variant):
        return [r for r in self.runs if r.dataset == dataset and r.ratio == ratio and r.variant == variant]

    def mean_sweeps(self, dataset, ratio, variant):
        return float(np.mean([r.sweeps for r in self.select(dataset, ratio, variant)]))

    def format_text(self):
        buf = io.StringIO()
        for note in self.notes:
            buf.write(f"# {note}\n")
        labels = [VARIANT_LABELS[v] for v in self.protocol.variants]
        head = f"{'data':<26} {'ratio':>6} " + " ".join(f"{lab:>9}" for lab in labels) + f" {'sparsity':>9}"
        buf.write(head + "\n" + "-" * len(head) + "\n")
        for ds in self.datasets():
            for ratio in self.protocol.ratios:
                cells = []
                for v in self.protocol.variants:
                    runs = self.select(ds, ratio, v)
                    mark = "" if all(r.converged for r in runs) else "*"
                    cells.append(f"{self.mean_sweeps(ds, ratio, v):>8.1f}{mark or ' '}")
                sp = np.mean([r.sparsity for r in self.select(ds, ratio, self.protocol.variants[0])])
                buf.write(f"{ds:<26} {ratio:>6g} " + " ".join(cells) + f" {sp:>9.4f}\n")
        if any(not r.converged for r in self.runs):
            buf.write("* some runs hit max_sweeps or missed the CD objective\n")
        return buf.getvalue()

    def format_csv(self):
        buf = io.StringIO()
        for note in self.notes:
            buf.write(f"# {note}\n")
        buf.write("dataset,ratio,variant,mean_sweeps,sweeps,mean_sparsity,all_converged\n")
        for ds in self.datasets():
            for ratio in self.protocol.ratios:
                for v in self.protocol.variants:
                    runs = self.select(ds, ratio, v)
                    sweeps = ";".join(str(r.sweeps) for r in runs)
                    sp = np.mean([r.sparsity for r in runs])
                    ok = all(r.converged for r in runs)
                    buf.write(f"{ds},{ratio:g},{v},{self.mean_sweeps(ds, ratio, v):.17g},{sweeps},{sp:.17g},{ok}\n")
        return buf.getvalue()


def default_jobs():
    try:
        return max(1, int(os.environ.get("SRR_LASSO_JOBS", "1")))
    except ValueError:
        return 1


def run_bench(sources, protocol, jobs=None):
    """Run every (source, seed, ratio) cell; results come back in task order."""
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    tasks = [(src, seed, ratio) for src in sources for seed in src.seeds for ratio in protocol.ratios]

    def work(task):
        src, seed, ratio = task
        X, y = src.load(seed)
        return run_cell(X, y, ratio, protocol, src.name, seed)

    if jobs == 1:
        results = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, tasks))
    notes = []
    for src in sources:
        if src.seeds == [None]:
            notes.append(f"{src.name}: file input, single run (repeats=1)")
        else:
            notes.append(f"{src.name}: seeds {src.seeds[0]}..{src.seeds[-1]}")
    return BenchTable(protocol, [r for cell in results for r in cell], notes)
