"""Cyclic coordinate descent for the Lasso and the per-coordinate ray factor."""

from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import NumericFailure
from .linalg import REFRESH_EVERY, objective_from_residual, residual

VARIANTS = ("cd", "srrc", "srrt")
REFINE_METHODS = ("auto", "sort", "bisection")


@dataclass
class SolverConfig:
    """Stopping rules and options shared by CD, CD+SRRC and CD+SRRT.

    A run stops at the first sweep k where any active rule fires:
    ``||beta^k - beta^(k-1)||_2 <= step_tol``, ``f(beta^k) <= target_objective``,
    or ``k == max_sweeps`` (the last one reports ``converged=False``).
    Set ``step_tol``/``target_objective`` to None to disable them.

    ``refine_method="auto"`` uses the closed form when lambda is 0 and the
    sort-based scan otherwise. ``trace=True`` keeps a copy of every iterate.
    ``debug=True`` asserts the descent ordering and positivity of the
    refinement factor on every sweep. ``fixed_alpha`` bypasses the line search
    (diagnostic use only).
    """

    variant: str = "cd"
    step_tol: float | None = 1e-6
    target_objective: float | None = None
    max_sweeps: int = 100_000
    refine_method: str = "auto"
    trace: bool = False
    debug: bool = False
    fixed_alpha: float | None = None

    def __post_init__(self):
        self.variant = self.variant.lower()
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.refine_method not in REFINE_METHODS:
            raise ValueError(f"unknown refine_method {self.refine_method!r}")
        if self.step_tol is not None and not self.step_tol > 0:
            raise ValueError("step_tol must be positive")
        if not (isinstance(self.max_sweeps, (int, np.integer)) and self.max_sweeps >= 1):
            raise ValueError("max_sweeps must be a positive integer")


@dataclass
class TraceRow:
    """One sweep.

    ``alpha`` is the refinement factor of the search point this sweep started
    from (None for plain CD and for sweep 1), so each row pairs beta^k with
    the factor that produced its starting point.
    """

    k: int
    f: float
    alpha: float | None
    step_norm: float
    sparsity: float


@dataclass
class IterationTrace:
    variant: str
    lam: float
    rows: list = field(default_factory=list)
    # beta^1..beta^K when SolverConfig.trace is set
    iterates: list | None = None

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        vals = [getattr(row, name) for row in self.rows]
        if name == "alpha":
            return np.array([np.nan if v is None else v for v in vals], dtype=float)
        return np.array(vals)

    def refinement_factors(self):
        """alpha^1, alpha^2, ... in the order they were computed."""
        return [row.alpha for row in self.rows[1:] if row.alpha is not None]


@dataclass
class SolveResult:
    beta: np.ndarray
    trace: IterationTrace
    converged: bool
    sweeps: int
    objective: float

    @property
    def status(self):
        return "converged" if self.converged else "max_sweeps"

    @property
    def sparsity(self):
        return sparsity(self.beta)

    def __iter__(self):
        # allows ``beta, trace = solve_cd(...)``
        return iter((self.beta, self.trace))


def sparsity(beta):
    """Fraction of exactly-zero entries."""
    beta = np.asarray(beta)
    return float(np.count_nonzero(beta == 0.0)) / beta.size


@numba.njit(cache=True, nogil=True)
def _sweep_kernel(X, col_norm_sq, lam, beta, r):
    # in place; returns the failing coordinate or -1
    n, p = X.shape
    for i in range(p):
        dot = 0.0
        for t in range(n):
            dot += X[t, i] * r[t]
        old = beta[i]
        z = old + dot / col_norm_sq[i]
        thr = lam / col_norm_sq[i]
        if z > thr:
            new = z - thr
        elif z < -thr:
            new = z + thr
        else:
            new = 0.0
        if not np.isfinite(new):
            return i
        delta = old - new
        if delta != 0.0:
            for t in range(n):
                r[t] += X[t, i] * delta
        beta[i] = new
    return -1


def _sweep_inplace(problem, beta, r):
    bad = _sweep_kernel(problem.X.values, problem.X.col_norm_sq, problem.lam, beta, r)
    if bad >= 0:
        raise NumericFailure(f"non-finite value at coordinate {bad}")


def cd_sweep(problem, beta_in, r_in):
    """One cyclic pass over coordinates 0..p-1, starting from ``beta_in``.

    ``r_in`` must be the residual ``y - X beta_in``. Returns new arrays
    ``(beta_out, r_out)``; the inputs are not modified.
    """
    beta = np.array(beta_in, dtype=np.float64)
    r = np.array(r_in, dtype=np.float64)
    if beta.shape != (problem.p,) or r.shape != (problem.n,):
        raise ValueError("beta_in/r_in have the wrong length")
    if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(r))):
        raise NumericFailure("non-finite input to cd_sweep")
    _sweep_inplace(problem, beta, r)
    return beta, r


def solve_cd(problem, config=None):
    """Plain cyclic coordinate descent from beta = 0."""
    config = config or SolverConfig()
    if config.variant != "cd":
        raise ValueError("solve_cd requires variant='cd'")
    beta = np.zeros(problem.p)
    r = problem.y.copy()
    trace = IterationTrace("cd", problem.lam, iterates=[] if config.trace else None)
    f_prev = objective_from_residual(problem, beta, r)
    converged = False
    k = 0
    while True:
        k += 1
        beta_prev = beta.copy()
        _sweep_inplace(problem, beta, r)
        if k % REFRESH_EVERY == 0:
            r = residual(problem, beta)
        f = objective_from_residual(problem, beta, r)
        step = float(np.linalg.norm(beta - beta_prev))
        trace.rows.append(TraceRow(k, f, None, step, sparsity(beta)))
        if config.trace:
            trace.iterates.append(beta.copy())
        if config.debug:
            assert f <= f_prev + 1e-12 * max(1.0, abs(f_prev)), f"objective increased at sweep {k}"
        f_prev = f
        if _stop(config, step, f):
            converged = True
            break
        if k >= config.max_sweeps:
            break
    return SolveResult(beta, trace, converged, k, f)


def _stop(config, step, f):
    if step == 0.0:
        # a sweep that moves nothing is a fixed point, hence optimal
        return True
    if config.step_tol is not None and step <= config.step_tol:
        return True
    if config.target_objective is not None and f <= config.target_objective:
        return True
    return False


def ray_alpha_estimate(beta_prev, beta_cur, beta_next):
    """Per-coordinate a with beta_next = (1 - a) * beta_prev + a * beta_cur.

    This is the position of beta_next on the ray from beta_prev through
    beta_cur, in the same parametrization as the SRR search point: a > 1
    means the next iterate overshoots beta_cur along the ray. Returns a masked
    array; coordinates where beta_prev and beta_cur (nearly) coincide are
    masked as undefined.
    """
    prev = np.asarray(beta_prev, dtype=np.float64)
    cur = np.asarray(beta_cur, dtype=np.float64)
    nxt = np.asarray(beta_next, dtype=np.float64)
    if not (prev.shape == cur.shape == nxt.shape):
        raise ValueError("iterates must have equal lengths")
    scale = max(1.0, float(np.max(np.abs(cur), initial=0.0)))
    denom = cur - prev
    undefined = np.abs(denom) < 1e-14 * scale
    safe = np.where(undefined, 1.0, denom)
    return np.ma.masked_array((nxt - prev) / safe, mask=undefined)
