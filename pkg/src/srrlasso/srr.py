"""Coordinate descent accelerated by successive ray refinement (SRRC / SRRT).

Each sweep starts from a search point s on the ray from a history point h
through the latest iterate beta, placed at the exact minimizer of the
objective along that ray. SRRC uses the previous search point as h (a
chain), SRRT the previous iterate (a triangle).
"""

import numpy as np

from .cd import IterationTrace, SolveResult, SolverConfig, TraceRow, _sweep_inplace, _stop, solve_cd, sparsity
from .errors import DegenerateRefinement
from .linalg import REFRESH_EVERY, objective_from_residual, residual
from .refine import RefinementInput, minimize_g

# f(h) and f(beta) this close (relative) means the ray is degenerate
SKIP_RTOL = 1e-14


def search_point(h, beta, alpha):
    """(1 - alpha) * h + alpha * beta."""
    h = np.asarray(h, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if h.shape != beta.shape:
        raise ValueError("h and beta must have equal length")
    return (1.0 - alpha) * h + alpha * beta


def _slack(f):
    return 1e-12 * max(1.0, abs(f))


def _refinement_factor(problem, config, h, beta, r_h, r, f_h, f_beta):
    if config.fixed_alpha is not None:
        return float(config.fixed_alpha)
    if abs(f_h - f_beta) <= SKIP_RTOL * abs(f_h):
        return 1.0
    try:
        alpha = minimize_g(RefinementInput(h, beta, r_h, r, problem.lam), config.refine_method)
    except DegenerateRefinement:
        return 1.0
    if config.debug and f_h > f_beta:
        assert alpha > 0.0, f"non-positive refinement factor {alpha}"
    return alpha


def _solve_srr(problem, config):
    chain = config.variant == "srrc"
    s = np.zeros(problem.p)
    r_s = problem.y.copy()
    f_s = objective_from_residual(problem, s, r_s)
    beta_prev, r_prev, f_prev = s.copy(), r_s.copy(), f_s
    trace = IterationTrace(config.variant, problem.lam, iterates=[] if config.trace else None)
    alpha_in = None
    converged = False
    k = 0
    while True:
        k += 1
        beta = s.copy()
        r = r_s.copy()
        _sweep_inplace(problem, beta, r)
        if k % REFRESH_EVERY == 0:
            r = residual(problem, beta)
        f = objective_from_residual(problem, beta, r)
        step = float(np.linalg.norm(beta - beta_prev))
        trace.rows.append(TraceRow(k, f, alpha_in, step, sparsity(beta)))
        if config.trace:
            trace.iterates.append(beta.copy())
        if config.debug:
            assert f <= f_s + _slack(f_s), f"f(beta^{k}) > f(s^{k - 1})"
        if _stop(config, step, f):
            converged = True
            break
        if k >= config.max_sweeps:
            break

        if chain:
            h, r_h, f_h = s, r_s, f_s
        else:
            h, r_h, f_h = beta_prev, r_prev, f_prev
        if k % REFRESH_EVERY == 0:
            # r was just recomputed; mixing it with a drifted r_h corrupts d = r_h - r
            r_h = residual(problem, h)
            f_h = objective_from_residual(problem, h, r_h)
        alpha = _refinement_factor(problem, config, h, beta, r_h, r, f_h, f)
        s = search_point(h, beta, alpha)
        r_s = (1.0 - alpha) * r_h + alpha * r
        if k % REFRESH_EVERY == 0:
            r_s = residual(problem, s)
        f_s = objective_from_residual(problem, s, r_s)
        if config.debug:
            assert f_s <= f + _slack(f), f"f(s^{k}) > f(beta^{k})"
        beta_prev, r_prev, f_prev = beta, r, f
        alpha_in = alpha
    return SolveResult(beta, trace, converged, k, f)


def solve_srrc(problem, config=None):
    config = config or SolverConfig(variant="srrc")
    if config.variant != "srrc":
        raise ValueError("solve_srrc requires variant='srrc'")
    return _solve_srr(problem, config)


def solve_srrt(problem, config=None):
    config = config or SolverConfig(variant="srrt")
    if config.variant != "srrt":
        raise ValueError("solve_srrt requires variant='srrt'")
    return _solve_srr(problem, config)


def solve(problem, config):
    """Dispatch on ``config.variant``."""
    if config.variant == "cd":
        return solve_cd(problem, config)
    return _solve_srr(problem, config)
