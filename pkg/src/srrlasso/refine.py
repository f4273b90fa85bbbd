"""Exact minimization of g(a) = f((1 - a) h + a beta) along a ray.

With d = r_h - r (residual difference) and c = beta - h, the subdifferential
for a > 0 is the piecewise-linear, nondecreasing set

    dg(a) = a ||d||^2 - <r_h, d> + lam * sum_i c_i SGN(h_i + a c_i)

Coordinates with h_i * c_i < 0 cross zero at the breakpoint
w_i = h_i / (h_i - beta_i) > 0, where the set jumps by 2 lam |c_i|. Every other
coordinate contributes a constant +|c_i| for all a > 0 (zero when c_i = 0).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRefinement


@dataclass(frozen=True)
class RefinementInput:
    h: np.ndarray
    beta: np.ndarray
    r_h: np.ndarray
    r: np.ndarray
    lam: float

    def __post_init__(self):
        for name in ("h", "beta", "r_h", "r"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if self.h.shape != self.beta.shape:
            raise ValueError("h and beta must have equal length")
        if self.r_h.shape != self.r.shape:
            raise ValueError("r_h and r must have equal length")
        if not self.lam >= 0:
            raise ValueError("lam must be nonnegative")


@dataclass(frozen=True)
class Breakpoint:
    indices: tuple
    w: float
    jump: float


class _Pieces:
    """Precomputed quantities that describe dg(a) on a > 0."""

    def __init__(self, inp):
        d = inp.r_h - inp.r
        self.a = float(d @ d)
        self.b = float(inp.r_h @ d)
        if self.a <= (1e-14 * float(np.linalg.norm(inp.r_h))) ** 2:
            raise DegenerateRefinement("r_h equals r; the ray is flat in the loss term")
        lam = inp.lam
        c = inp.beta - inp.h
        absc = np.abs(c)
        omega = inp.h * c < 0
        self.lam = lam
        self.const = float(absc[~omega].sum())
        idx = np.flatnonzero(omega)
        w = inp.h[idx] / (inp.h[idx] - inp.beta[idx])
        order = np.argsort(w, kind="stable")
        self.idx = idx[order]
        self.w_all = w[order]
        self.c_all = absc[idx][order]
        self.total = float(self.c_all.sum())
        # group equal breakpoints
        if self.w_all.size:
            starts = np.flatnonzero(np.r_[True, self.w_all[1:] != self.w_all[:-1]])
            self.w = self.w_all[starts]
            self.cabs = np.add.reduceat(self.c_all, starts)
            self.starts = starts
        else:
            self.w = self.w_all
            self.cabs = self.c_all
            self.starts = np.zeros(0, dtype=int)
        self.scale = self.a + lam * float(absc.sum()) + 1.0

    def line(self, alpha, passed):
        """Value of dg on the open piece where ``passed`` of |c| has flipped sign."""
        return self.a * alpha - self.b + self.lam * (self.const - self.total + 2.0 * passed)

    def root(self, passed):
        return (self.b - self.lam * (self.const - self.total + 2.0 * passed)) / self.a

    def interval(self, alpha):
        below = float(self.c_all[self.w_all < alpha].sum())
        at = float(self.c_all[self.w_all == alpha].sum())
        lo = self.line(alpha, below)
        return lo, lo + 2.0 * self.lam * at

    def check_positive_start(self):
        # dg(0+) must be negative for a positive minimizer to exist
        if self.line(0.0, 0.0) >= 0.0:
            raise DegenerateRefinement("g is nondecreasing on a > 0; no positive minimizer")


def subgradient_interval(inp, alpha):
    """Return (lo, hi), the endpoints of the subdifferential of g at alpha > 0."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return _Pieces(inp).interval(float(alpha))


def breakpoints(inp):
    """Ascending breakpoints of dg, equal w values merged with summed jumps."""
    c = inp.beta - inp.h
    omega = np.flatnonzero(inp.h * c < 0)
    if omega.size == 0:
        return []
    w = inp.h[omega] / (inp.h[omega] - inp.beta[omega])
    order = np.argsort(w, kind="stable")
    out = []
    for i in order:
        jump = 2.0 * inp.lam * abs(c[omega[i]])
        if out and out[-1].w == w[i]:
            last = out[-1]
            out[-1] = Breakpoint(last.indices + (int(omega[i]),), last.w, last.jump + jump)
        else:
            out.append(Breakpoint((int(omega[i]),), float(w[i]), jump))
    return out


def alpha_closed_form(inp):
    """Minimizer for lam = 0: <r_h, r_h - r> / ||r_h - r||^2."""
    d = inp.r_h - inp.r
    a = float(d @ d)
    if a <= (1e-14 * float(np.linalg.norm(inp.r_h))) ** 2:
        raise DegenerateRefinement("r_h equals r; the ray is flat in the loss term")
    return float(inp.r_h @ d) / a


def alpha_by_sort(inp, stats=None):
    """Scan the sorted breakpoints left to right until dg changes sign."""
    pc = _Pieces(inp)
    pc.check_positive_start()
    if stats is not None:
        stats["touched"] = stats.get("touched", 0) + inp.h.size
        stats["sorted"] = stats.get("sorted", 0) + pc.w_all.size
    passed = 0.0
    for w, cabs in zip(pc.w, pc.cabs):
        if stats is not None:
            stats["evaluations"] = stats.get("evaluations", 0) + 1
        lo = pc.line(w, passed)
        hi = lo + 2.0 * pc.lam * cabs
        if lo <= 0.0 <= hi:
            return float(w)
        if lo > 0.0:
            # root on the open piece to the left of w
            return pc.root(passed)
        passed += cabs
    return pc.root(passed)


def alpha_by_bisection(inp, stats=None):
    """Bisection on a bracket [a1, a2], snapping probes to breakpoints.

    After each midpoint probe the bracket end that moved is pushed to the
    nearest breakpoint on the far side, which is evaluated too. Once no
    breakpoint lies strictly inside the bracket, dg is a single line there
    and its root is returned in closed form.
    """
    pc = _Pieces(inp)
    pc.check_positive_start()
    w = pc.w
    m = w.size

    def evaluate(alpha):
        if stats is not None:
            stats["evaluations"] = stats.get("evaluations", 0) + 1
        return pc.interval(alpha)

    # a1 = 0 is an open end: dg(0+) < 0 was checked above
    a1 = 0.0
    a2 = 1.0
    while True:
        lo, hi = evaluate(a2)
        if lo <= 0.0 <= hi:
            return a2
        if lo > 0.0:
            break
        a1 = a2
        a2 *= 2.0
        if not math.isfinite(a2):
            raise DegenerateRefinement("failed to bracket the root")
    while True:
        # breakpoints strictly inside (a1, a2)
        left = int(np.searchsorted(w, a1, side="right"))
        right = int(np.searchsorted(w, a2, side="left"))
        if left >= right:
            passed = float(pc.cabs[:left].sum())
            return pc.root(passed)
        mid = 0.5 * (a1 + a2)
        lo, hi = evaluate(mid)
        if lo <= 0.0 <= hi:
            return mid
        if lo > 0.0:
            a2 = mid
            j = int(np.searchsorted(w, mid, side="left")) - 1
            if j >= left:
                lo, hi = evaluate(float(w[j]))
                if lo <= 0.0 <= hi:
                    return float(w[j])
                if lo > 0.0:
                    a2 = float(w[j])
                else:
                    a1 = float(w[j])
        else:
            a1 = mid
            j = int(np.searchsorted(w, mid, side="right"))
            if j < right and j < m:
                lo, hi = evaluate(float(w[j]))
                if lo <= 0.0 <= hi:
                    return float(w[j])
                if lo > 0.0:
                    a2 = float(w[j])
                else:
                    a1 = float(w[j])


def minimize_g(inp, method="auto", stats=None):
    """Refinement factor: closed form for lam = 0, else the chosen scan."""
    if inp.lam == 0.0:
        return alpha_closed_form(inp)
    if method in ("auto", "sort"):
        return alpha_by_sort(inp, stats)
    if method == "bisection":
        return alpha_by_bisection(inp, stats)
    raise ValueError(f"unknown refinement method {method!r}")


def g_value(inp, alpha):
    """g(alpha) through the residual form (no access to X needed)."""
    d = inp.r_h - inp.r
    res = inp.r_h - alpha * d
    point = (1.0 - alpha) * inp.h + alpha * inp.beta
    return 0.5 * float(res @ res) + inp.lam * float(np.abs(point).sum())
