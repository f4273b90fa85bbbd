"""Gauss-Seidel spectral diagnostics for the lam = 0 case.

At lam = 0 one CD sweep is a Gauss-Seidel step on X^T X beta = X^T y. With
X^T X = L + D + U, the error propagates through G = -(L + D)^{-1} U; the
contraction of SRRC along eigenvalue delta_i of G is tracked by the products
t_i^k of per-sweep factors sigma_i^k.

Dense and desk-scale only (p <= 512 by default).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericFailure, UnsupportedScale
from .linalg import DesignMatrix

MAX_P = 512
_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class LduSplit:
    L: np.ndarray
    D: np.ndarray  # diagonal entries only
    U: np.ndarray

    @property
    def p(self):
        return self.D.shape[0]

    def gram(self):
        return self.L + np.diag(self.D) + self.U


def ldu_split(X, max_p=MAX_P):
    """Strictly-lower / diagonal / strictly-upper parts of X^T X."""
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix(X)
    if X.p > max_p:
        raise UnsupportedScale(f"p={X.p} exceeds the dense spectral ceiling {max_p}")
    A = X.gram()
    return LduSplit(np.tril(A, -1), np.diag(A).copy(), np.triu(A, 1))


def _forward_solve(split, B):
    """Solve (L + D) Z = B by forward substitution."""
    B = np.asarray(B, dtype=np.float64)
    Z = np.empty_like(B)
    L, D = split.L, split.D
    for i in range(split.p):
        Z[i] = (B[i] - L[i, :i] @ Z[:i]) / D[i]
    return Z


def gauss_seidel_matrix(split):
    """G = -(L + D)^{-1} U, without forming the inverse."""
    return _forward_solve(split, -split.U)


def apply_g(split, v):
    return _forward_solve(split, -(split.U @ v))


def gauss_seidel_step(split, Xty, beta):
    """(L + D)^{-1} (X^T y - U beta): one lam = 0 sweep in matrix form."""
    return _forward_solve(split, np.asarray(Xty) - split.U @ beta)


# --- eigenvalues of a general real matrix -----------------------------------


def balance(A):
    """Parlett-Reinsch balancing by powers of two; returns a new matrix."""
    A = np.array(A, dtype=np.float64)
    n = A.shape[0]
    radix = 2.0
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            r = float(np.abs(A[i]).sum() - abs(A[i, i]))
            c = float(np.abs(A[:, i]).sum() - abs(A[i, i]))
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                A[i, :] /= f
                A[:, i] *= f
    return A


def hessenberg(A):
    """Householder reduction to upper Hessenberg form (similarity)."""
    H = np.array(A, dtype=np.float64)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k]
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(norm, x[0])
        v /= np.linalg.norm(v)
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v)
        H[k + 2 :, k] = 0.0
    return H


def _hqr(a, max_its=30):
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Works in real arithmetic; complex eigenvalues come out as conjugate
    pairs. Overwrites ``a``.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = 0.0
    for i in range(n):
        anorm += float(np.abs(a[i, max(i - 1, 0) :]).sum())
    nn = n - 1
    t = 0.0
    p = q = r = s = w = x = y = z = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= _EPS * s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if its == max_its:
                raise NumericFailure("QR iteration failed to deflate")
            if its in (10, 20):
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u <= _EPS * v:
                    break
                m -= 1
            for i in range(m, nn - 1):
                a[i + 2, i] = 0.0
                if i != m:
                    a[i + 2, i - 1] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k + 1 != nn else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                # row modification
                pr = a[k, k : nn + 1] + q * a[k + 1, k : nn + 1]
                if k + 1 != nn:
                    pr = pr + r * a[k + 2, k : nn + 1]
                    a[k + 2, k : nn + 1] -= pr * z
                a[k + 1, k : nn + 1] -= pr * y
                a[k, k : nn + 1] -= pr * x
                # column modification
                mmin = nn if nn < k + 3 else k + 3
                pc = x * a[l : mmin + 1, k] + y * a[l : mmin + 1, k + 1]
                if k + 1 != nn:
                    pc = pc + z * a[l : mmin + 1, k + 2]
                    a[l : mmin + 1, k + 2] -= pc * r
                a[l : mmin + 1, k + 1] -= pc * q
                a[l : mmin + 1, k] -= pc
    return wr + 1j * wi


def eigenvalues(M, balanced=True):
    """All eigenvalues of a real square matrix, sorted by (|z|, Re z, Im z)."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("eigenvalues() needs a square matrix")
    if M.shape[0] > MAX_P:
        raise UnsupportedScale(f"matrix order {M.shape[0]} exceeds {MAX_P}")
    if not np.all(np.isfinite(M)):
        raise NumericFailure("matrix has non-finite entries")
    if M.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    A = balance(M) if balanced else M.copy()
    ev = _hqr(hessenberg(A))
    order = np.lexsort((ev.imag, ev.real, np.abs(ev)))
    return ev[order]


# --- SRR factor products and recursion checks ---------------------------------


def srrc_factor_products(eigs, alphas):
    """|t_i^k| for k = 1..len(alphas), one column per eigenvalue.

    ``alphas`` holds alpha^1, alpha^2, ... as computed by SRRC. The factors
    are sigma^1 = delta and sigma^k = alpha^k (delta + (1 - alpha^(k-1)) /
    alpha^(k-1)) for k >= 2; t^k is their running product. All-ones alphas
    give plain CD (t^k = delta^k).
    """
    delta = np.asarray(eigs, dtype=complex)
    alphas = [float(a) for a in alphas]
    out = np.zeros((len(alphas), delta.size))
    t = np.ones_like(delta)
    for k, a in enumerate(alphas):
        if k == 0:
            sigma = delta
        else:
            prev = alphas[k - 1]
            sigma = a * (delta + (1.0 - prev) / prev)
        t = t * sigma
        out[k] = np.abs(t)
    return out


def _with_origin(iterates):
    betas = [np.zeros_like(np.asarray(iterates[0], dtype=float))] + [np.asarray(b, float) for b in iterates]
    return betas


def srrt_recursion_check(problem, iterates, alphas, split=None):
    """Largest defect of the SRRT difference recursion over a lam = 0 run.

    ``iterates`` are beta^1..beta^K, ``alphas`` alpha^1..alpha^(K-1). Checks
    beta^2 - beta^1 = alpha^1 G beta^1 and, for k >= 3,
    beta^k - beta^(k-1) = G[(1 - alpha^(k-2))(beta^(k-2) - beta^(k-3))
                            + alpha^(k-1)(beta^(k-1) - beta^(k-2))].
    """
    if problem.lam != 0.0:
        raise ValueError("the SRRT recursion only holds for lam = 0")
    split = split or ldu_split(problem.X)
    b = _with_origin(iterates)
    K = len(iterates)
    if len(alphas) < K - 1:
        raise ValueError("need alpha^1..alpha^(K-1)")
    worst = 0.0
    for k in range(2, K + 1):
        if k == 2:
            rhs = alphas[0] * apply_g(split, b[1] - b[0])
        else:
            v = (1.0 - alphas[k - 3]) * (b[k - 2] - b[k - 3]) + alphas[k - 2] * (b[k - 1] - b[k - 2])
            rhs = apply_g(split, v)
        worst = max(worst, float(np.linalg.norm((b[k] - b[k - 1]) - rhs)))
    return worst


def srrc_telescoping_defect(problem, iterates, alphas, split=None):
    """Largest defect of s^k - s^(k-1) = A^k (s^(k-1) - s^(k-2)), lam = 0.

    A^k = alpha^k [G + (1 - alpha^(k-1)) / alpha^(k-1) I]; search points are
    rebuilt from the iterates and alphas.
    """
    if problem.lam != 0.0:
        raise ValueError("the SRRC recursion only holds for lam = 0")
    split = split or ldu_split(problem.X)
    b = _with_origin(iterates)
    m = min(len(alphas), len(iterates))
    s = [b[0]]
    for k in range(1, m + 1):
        a = alphas[k - 1]
        s.append((1.0 - a) * s[k - 1] + a * b[k])
    worst = 0.0
    for k in range(2, m + 1):
        a, prev = alphas[k - 1], alphas[k - 2]
        v = s[k - 1] - s[k - 2]
        rhs = a * (apply_g(split, v) + (1.0 - prev) / prev * v)
        worst = max(worst, float(np.linalg.norm((s[k] - s[k - 1]) - rhs)))
    return worst


@dataclass
class EigenReport:
    eigenvalues: np.ndarray
    max_magnitude: float
    products: np.ndarray | None = None
    tolerance: float = 1e-9

    @property
    def bound_ok(self):
        return self.max_magnitude <= 1.0 + self.tolerance

    def to_dict(self):
        out = {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "max_magnitude": self.max_magnitude,
            "spectral_bound_ok": self.bound_ok,
        }
        if self.products is not None:
            out["t_magnitudes"] = self.products.tolist()
            out["t_final"] = self.products[-1].tolist() if len(self.products) else []
        return out


def eigen_report(X, alphas=None, max_p=MAX_P):
    split = ldu_split(X, max_p=max_p)
    ev = eigenvalues(gauss_seidel_matrix(split))
    products = srrc_factor_products(ev, alphas) if alphas is not None else None
    return EigenReport(ev, float(np.max(np.abs(ev), initial=0.0)), products)
