"""Two-period consumption-saving choice and its Slutsky decomposition.

The household maximises ``u(c1) + beta * u(c2)`` subject to
``c1 + c2 / (1 + r) = m1 + m2 / (1 + r)``. Optimal ``c1`` is found by
bisection on the log Euler residual; constant-IES preferences also have a
closed form, which is used as a runtime cross-check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConvergenceError, InfeasibleEndowmentError, InputError
from .numerics import Tolerance, default_step, find_root, finite_diff

# Bisect until the bracket cannot be split further; the Slutsky terms are
# central differences over h=1e-6 and need c1 close to machine precision.
SOLVER_TOL = Tolerance(abs_tol=1e-300, rel_tol=2.5e-16, max_iter=400)
RATE_STEP = 1e-6
_EDGE = 1e-12


class UtilityKind(enum.Enum):
    LOG = "log"
    CONSTANT_IES = "ies"


@dataclass(frozen=True)
class UtilityFamily:
    """Period utility with intertemporal elasticity of substitution ``ies_sigma``.

    ``u'(c) = c ** (-1 / sigma)``; ``sigma = 1`` is the log case.
    """

    kind: UtilityKind = UtilityKind.LOG
    ies_sigma: float = 1.0

    def __post_init__(self):
        if not self.ies_sigma > 0:
            raise InputError(f"ies_sigma must be positive, got {self.ies_sigma!r}")
        if self.kind is UtilityKind.LOG and self.ies_sigma != 1.0:
            raise InputError("log utility has ies_sigma = 1")

    @classmethod
    def log(cls) -> UtilityFamily:
        return cls(UtilityKind.LOG, 1.0)

    @classmethod
    def constant_ies(cls, sigma: float) -> UtilityFamily:
        return cls(UtilityKind.CONSTANT_IES, float(sigma))

    @property
    def sigma(self) -> float:
        return self.ies_sigma

    def utility(self, c: float) -> float:
        if self.kind is UtilityKind.LOG or self.ies_sigma == 1.0:
            return math.log(c)
        e = 1.0 - 1.0 / self.ies_sigma
        return c**e / e

    def marginal_utility(self, c: float) -> float:
        if self.kind is UtilityKind.LOG:
            return 1.0 / c
        return c ** (-1.0 / self.ies_sigma)

    def log_marginal_utility(self, c: float) -> float:
        return -math.log(c) / self.ies_sigma


@dataclass(frozen=True)
class Preferences:
    rho: float
    utility: UtilityFamily = UtilityFamily()

    def __post_init__(self):
        if not (self.rho >= 0 and math.isfinite(self.rho)):
            raise InputError(f"time-preference rate must be >= 0, got {self.rho!r}")

    @property
    def beta(self) -> float:
        return 1.0 / (1.0 + self.rho)

    def lifetime_utility(self, c1: float, c2: float) -> float:
        return self.utility.utility(c1) + self.beta * self.utility.utility(c2)


@dataclass(frozen=True)
class Endowment:
    m1: float
    m2: float

    def __post_init__(self):
        if not (self.m1 >= 0 and self.m2 >= 0):
            raise InputError(f"endowments must be non-negative, got ({self.m1}, {self.m2})")
        if not (self.m1 + self.m2 > 0 and math.isfinite(self.m1 + self.m2)):
            raise InputError("total endowment must be positive and finite")


@dataclass(frozen=True)
class Allocation:
    c1: float
    c2: float
    savings: float
    r: float
    wealth: float


@dataclass(frozen=True)
class SlutskyDecomposition:
    """Terms of ``dc1/dr = substitution + (m1 - c1) * dc1/dW``.

    ``dc1_dwealth`` is taken with respect to wealth in period-2 units (a
    lump-sum transfer paid in period 2), the units in which the identity is
    exact.
    """

    total: float
    substitution: float
    income: float
    dc1_dwealth: float

    @property
    def residual(self) -> float:
        return self.total - self.substitution - self.income


def _check_rate(r):
    if not (r > -1 and math.isfinite(r)):
        raise InputError(f"interest rate must exceed -1, got {r!r}")


def wealth(endow: Endowment, r: float) -> float:
    _check_rate(r)
    return endow.m1 + endow.m2 / (1.0 + r)


def closed_form_c1(prefs: Preferences, W: float, r: float) -> float:
    """``c1 = W / (1 + [beta (1+r)]^sigma / (1+r))``."""
    growth = (prefs.beta * (1.0 + r)) ** prefs.utility.sigma
    return W / (1.0 + growth / (1.0 + r))


def _c1_at_wealth(prefs, W, r):
    u = prefs.utility
    log_beta_gross = math.log(prefs.beta * (1.0 + r))
    gross = 1.0 + r

    def residual(c1):
        return u.log_marginal_utility(c1) - log_beta_gross - u.log_marginal_utility(gross * (W - c1))

    c1 = find_root(residual, _EDGE * W, W - _EDGE * W, SOLVER_TOL)
    reference = closed_form_c1(prefs, W, r)
    if abs(c1 - reference) > 1e-8 * W:
        raise ConvergenceError(
            f"Euler solution c1={c1!r} disagrees with closed form {reference!r}"
        )
    return c1


def _allocate(prefs, m1, W, r):
    if not W > 0:
        raise InfeasibleEndowmentError(f"lifetime wealth must be positive, got {W!r}")
    c1 = _c1_at_wealth(prefs, W, r)
    c2 = (1.0 + r) * (W - c1)
    return Allocation(c1=c1, c2=c2, savings=m1 - c1, r=r, wealth=W)


def solve_consumption(prefs: Preferences, endow: Endowment, r: float) -> Allocation:
    """Optimal two-period allocation at interest rate ``r > -1``."""
    W = wealth(endow, r)
    return _allocate(prefs, endow.m1, W, r)


def euler_residual(prefs: Preferences, alloc: Allocation) -> float:
    """``(u'(c1) - beta (1+r) u'(c2)) / u'(c1)``."""
    u = prefs.utility
    mu1 = u.marginal_utility(alloc.c1)
    return (mu1 - prefs.beta * (1.0 + alloc.r) * u.marginal_utility(alloc.c2)) / mu1


def indirect_utility(prefs: Preferences, W: float, r: float) -> float:
    alloc = _allocate(prefs, W, W, r)
    return prefs.lifetime_utility(alloc.c1, alloc.c2)


def compensating_wealth(prefs: Preferences, target_utility: float, r: float, guess: float) -> float:
    """Wealth that attains ``target_utility`` at rate ``r``."""
    gap = lambda W: indirect_utility(prefs, W, r) - target_utility
    lo, hi = 0.5 * guess, 2.0 * guess
    for _ in range(60):
        if gap(lo) <= 0:
            break
        lo *= 0.5
    for _ in range(60):
        if gap(hi) >= 0:
            break
        hi *= 2.0
    return find_root(gap, lo, hi, SOLVER_TOL)


def slutsky_decompose(
    prefs: Preferences, endow: Endowment, r: float, h: float = RATE_STEP
) -> SlutskyDecomposition:
    """Split ``dc1/dr`` into compensated and endowment-income parts.

    Compensated demand holds utility at the level attained at ``r`` by
    re-solving with the wealth that restores it at each perturbed rate.
    """
    _check_rate(r - h)
    base = solve_consumption(prefs, endow, r)
    target = prefs.lifetime_utility(base.c1, base.c2)

    total = finite_diff(lambda rr: solve_consumption(prefs, endow, rr).c1, r, h)

    def compensated_c1(rr):
        W = compensating_wealth(prefs, target, rr, base.wealth)
        return _c1_at_wealth(prefs, W, rr)

    substitution = finite_diff(compensated_c1, r, h)

    W = base.wealth
    dc1_dW_present = finite_diff(lambda w: _c1_at_wealth(prefs, w, r), W, default_step(W))
    dc1_dwealth = dc1_dW_present / (1.0 + r)
    income = (endow.m1 - base.c1) * dc1_dwealth
    return SlutskyDecomposition(total, substitution, income, dc1_dwealth)


def savings_response(prefs: Preferences, endow: Endowment, r: float, h: float = RATE_STEP) -> float:
    """``ds/dr``, i.e. minus the total response of ``c1``."""
    _check_rate(r - h)
    return -finite_diff(lambda rr: solve_consumption(prefs, endow, rr).c1, r, h)
