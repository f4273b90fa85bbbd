"""Dense design matrix, the Lasso objective, shrinkage and residual bookkeeping."""

from dataclasses import dataclass

import numpy as np

from .errors import ZeroColumnError

# residuals are recomputed from scratch at least this often
REFRESH_EVERY = 50


class DesignMatrix:
    """Column-major n x p matrix with cached squared column norms.

    The squared norms are the denominators of every coordinate update, so
    they are computed once here and never touched again.
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2 or values.size == 0:
            raise ValueError(f"design matrix must be a non-empty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("design matrix contains non-finite entries")
        self.values = np.asfortranarray(values)
        self.values.setflags(write=False)
        self.col_norm_sq = np.einsum("ij,ij->j", self.values, self.values)
        self.col_norm_sq.setflags(write=False)
        zero = np.flatnonzero(self.col_norm_sq == 0.0)
        if zero.size:
            raise ZeroColumnError(f"zero column(s) at index {zero.tolist()}")

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def column(self, i):
        return self.values[:, i]

    def __matmul__(self, other):
        return self.values @ other

    def gram(self):
        return self.values.T @ self.values

    def __repr__(self):
        return f"DesignMatrix(n={self.n}, p={self.p})"


@dataclass(frozen=True)
class Problem:
    X: DesignMatrix
    y: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        X = self.X if isinstance(self.X, DesignMatrix) else DesignMatrix(self.X)
        y = np.array(self.y, dtype=np.float64).ravel()
        if y.shape[0] != X.n:
            raise ValueError(f"response has length {y.shape[0]}, expected {X.n}")
        if not np.all(np.isfinite(y)):
            raise ValueError("response contains non-finite entries")
        lam = float(self.lam)
        if not lam >= 0.0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam!r}")
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self):
        return self.X.n

    @property
    def p(self):
        return self.X.p

    @property
    def drift_tol(self):
        return 1e-8 * (1.0 + float(np.linalg.norm(self.y)))

    def with_lambda(self, lam):
        return Problem(self.X, self.y, lam)


@dataclass
class SolverState:
    beta: np.ndarray
    s: np.ndarray
    r: np.ndarray
    r_s: np.ndarray
    sweep: int = 0

    @classmethod
    def initial(cls, problem):
        """Zero start: beta = s = 0 and both residuals equal y."""
        p = problem.p
        return cls(np.zeros(p), np.zeros(p), problem.y.copy(), problem.y.copy())


def _check_beta(problem, beta):
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (problem.p,):
        raise ValueError(f"beta has shape {beta.shape}, expected ({problem.p},)")
    return beta


def objective(problem, beta):
    """0.5 * ||X beta - y||^2 + lam * ||beta||_1."""
    beta = _check_beta(problem, beta)
    resid = problem.X @ beta - problem.y
    return 0.5 * float(resid @ resid) + problem.lam * float(np.abs(beta).sum())


def objective_from_residual(problem, beta, r):
    """Objective using an already-known residual r = y - X beta."""
    return 0.5 * float(r @ r) + problem.lam * float(np.abs(beta).sum())


def shrinkage(x, threshold):
    """Soft thresholding S(x, t); works elementwise on arrays."""
    if np.any(np.asarray(threshold) < 0):
        raise ValueError("threshold must be nonnegative")
    if np.ndim(x) == 0 and np.ndim(threshold) == 0:
        if x > threshold:
            return x - threshold
        if x < -threshold:
            return x + threshold
        return 0.0
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def residual(problem, beta):
    beta = _check_beta(problem, beta)
    return problem.y - problem.X @ beta


def drift_check_and_refresh(problem, state):
    """Replace cached residuals that drifted more than drift_tol (inf-norm).

    Returns ``(state, refreshed)``. The comparison is strict: a deviation of
    exactly drift_tol is left alone.
    """
    tol = problem.drift_tol
    refreshed = False
    r_true = residual(problem, state.beta)
    if np.max(np.abs(state.r - r_true), initial=0.0) > tol:
        state.r = r_true
        refreshed = True
    rs_true = residual(problem, state.s)
    if np.max(np.abs(state.r_s - rs_true), initial=0.0) > tol:
        state.r_s = rs_true
        refreshed = True
    return state, refreshed

