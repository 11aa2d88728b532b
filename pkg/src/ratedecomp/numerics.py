"""Shared numerical kernel: bracketing root finder, central differences,
exact binomial quantiles and an SVD-based least-squares fit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import BracketError, ConvergenceError, EvaluationError, InputError

# Reported instead of s_max/s_min when the design is numerically rank deficient.
RANK_DEFICIENT_CONDITION = 1e16


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise InputError("tolerances must be positive")
        if self.max_iter < 1:
            raise InputError("max_iter must be at least 1")


DEFAULT_TOL = Tolerance()


def _checked(f, x):
    fx = f(x)
    if not math.isfinite(fx):
        raise EvaluationError(f"non-finite function value {fx!r} at x={x!r}")
    return fx


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
    polish: bool = False,
) -> float:
    """Bisection on ``[lo, hi]``, optionally followed by Newton steps.

    Stops once ``|f(x)| <= abs_tol``, the bracket is narrower than
    ``rel_tol * |x|``, or the bracket cannot be split further in floating point.
    """
    if lo > hi:
        lo, hi = hi, lo
    flo = _checked(f, lo)
    fhi = _checked(f, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"f({lo})={flo:g} and f({hi})={fhi:g} have the same sign")

    for _ in range(tol.max_iter):
        mid = 0.5 * (lo + hi)
        fmid = _checked(f, mid)
        if (
            abs(fmid) <= tol.abs_tol
            or hi - lo <= tol.rel_tol * abs(mid)
            or mid <= lo
            or mid >= hi
        ):
            break
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    else:
        raise ConvergenceError(f"bisection did not converge in {tol.max_iter} iterations")

    if polish:
        mid, fmid = _newton_polish(f, mid, fmid, lo, hi)
    return mid


def _newton_polish(f, x, fx, lo, hi, steps=3):
    # only accept steps that stay in the bracket and reduce |f|
    for _ in range(steps):
        if fx == 0.0:
            break
        try:
            d = finite_diff(f, x)
        except EvaluationError:
            break
        if d == 0.0:
            break
        cand = x - fx / d
        if not lo <= cand <= hi:
            break
        fc = f(cand)
        if not math.isfinite(fc) or abs(fc) >= abs(fx):
            break
        x, fx = cand, fc
    return x, fx


def default_step(x: float) -> float:
    return max(1e-6, 1e-6 * abs(x))


def finite_diff(f: Callable[[float], float], x: float, h: float | None = None) -> float:
    """Central difference ``(f(x+h) - f(x-h)) / 2h``."""
    if h is None:
        h = default_step(x)
    if not h > 0:
        raise InputError("step size must be positive")
    up = _checked(f, x + h)
    down = _checked(f, x - h)
    return (up - down) / (2.0 * h)


def binomial_quantile(n: int, p: float, level: float) -> int:
    """Smallest ``k`` with ``P(Binomial(n, p) <= k) >= level``.

    The CDF is accumulated term by term from log-space PMF values, so large
    ``n`` does not underflow the leading terms into a wrong answer.
    """
    if n < 0 or int(n) != n:
        raise InputError(f"n must be a non-negative integer, got {n!r}")
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p!r}")
    if not 0.0 < level < 1.0:
        raise InputError(f"level must lie in (0, 1), got {level!r}")
    n = int(n)
    if n == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return n
    k = np.arange(n + 1, dtype=float)
    logpmf = (
        gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
        + k * math.log(p) + (n - k) * math.log1p(-p)
    )
    cdf = np.cumsum(np.exp(logpmf))
    idx = int(np.searchsorted(cdf, level, side="left"))
    return min(idx, n)


@dataclass(frozen=True, eq=False)
class LeastSquaresFit:
    coefficients: np.ndarray
    standard_errors: np.ndarray
    r_squared: float
    condition_number: float
    rank: int
    residuals: np.ndarray = field(repr=False)

    @property
    def rank_deficient(self) -> bool:
        return self.rank < len(self.coefficients)


def _has_constant(X):
    return bool(np.any(np.all(X == X[0], axis=0) & (X[0] != 0)))


def ols_fit(X, y) -> LeastSquaresFit:
    """Least squares via the thin SVD of ``X``.

    Singular directions below ``max(n, k) * eps * s_max`` are dropped: the
    coefficient vector is the minimum-norm solution (zero along dropped
    directions), the condition number is set to ``RANK_DEFICIENT_CONDITION``,
    and coefficients that load on a dropped direction get an infinite
    standard error. R-squared is centred when ``X`` has a constant column and
    uncentred otherwise.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if y.shape != (n,):
        raise InputError(f"y has shape {y.shape}, expected ({n},)")
    if not (n >= k >= 1):
        raise InputError(f"need n >= k >= 1, got n={n}, k={k}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise InputError("design matrix and response must be finite")

    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    cutoff = s[0] * max(n, k) * np.finfo(float).eps if s[0] > 0 else 0.0
    rank = int(np.sum(s > cutoff))
    inv_s = np.zeros_like(s)
    inv_s[:rank] = 1.0 / s[:rank]

    beta = Vt.T @ (inv_s * (U.T @ y))
    resid = y - X @ beta
    rss = float(resid @ resid)

    if rank == k:
        cond = float(s[0] / s[-1])
    else:
        cond = RANK_DEFICIENT_CONDITION

    dof = n - rank
    if dof > 0:
        sigma2 = rss / dof
        cov_diag = sigma2 * np.sum((Vt.T * inv_s) ** 2, axis=1)
        se = np.sqrt(cov_diag)
    else:
        se = np.full(k, np.inf)
    if rank < k:
        null_loading = np.linalg.norm(Vt[rank:].T, axis=1)
        se = np.where(null_loading > 1e-8, np.inf, se)

    if _has_constant(X):
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)
    r2 = 1.0 - rss / tss if tss > 0 else (1.0 if rss == 0 else 0.0)
    r2 = min(max(r2, 0.0), 1.0)

    return LeastSquaresFit(
        coefficients=beta,
        standard_errors=se,
        r_squared=r2,
        condition_number=cond,
        rank=rank,
        residuals=resid,
    )
