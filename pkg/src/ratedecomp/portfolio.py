"""Two-stage saving problem with cash ``M`` (zero return) and bonds ``B``.

    max u(c1) + beta u(c2)
    s.t. c1 + M + B = m1,  c2 = m2 + M + (1+r) B,  M >= 0,  B >= 0

With ``mu`` and ``nu`` the multipliers on ``M >= 0`` and ``B >= 0``, the
first-order conditions give ``mu = u'(c1) - beta u'(c2)`` and
``nu = u'(c1) - beta (1+r) u'(c2)``. For ``r > 0`` cash is dominated and the
interior solution coincides with the one-asset consumption problem.
"""

from __future__ import annotations

from dataclasses import dataclass

from .consumer import Endowment, Preferences, solve_consumption
from .errors import InfeasibleEndowmentError, InputError


@dataclass(frozen=True)
class PortfolioAllocation:
    c1: float
    c2: float
    cash: float
    bonds: float
    kkt_mu: float
    kkt_nu: float
    r: float

    @property
    def savings(self) -> float:
        return self.cash + self.bonds


def cash_dominated(r: float) -> bool:
    if r < 0:
        raise InputError(f"cash dominance is defined for r >= 0, got {r!r}")
    return r > 0


def _multipliers(prefs, c1, c2, r):
    u = prefs.utility
    mu1, mu2 = u.marginal_utility(c1), u.marginal_utility(c2)
    return mu1 - prefs.beta * mu2, mu1 - prefs.beta * (1.0 + r) * mu2


def solve_portfolio(prefs: Preferences, endow: Endowment, r: float) -> PortfolioAllocation:
    """Optimal consumption and cash/bond split for ``r >= 0``.

    At ``r = 0`` the two stores of value are identical and all saving is
    booked as bonds. Households that would like to borrow sit at the corner
    ``M = B = 0`` since neither instrument can be shorted.
    """
    if not r >= 0:
        raise InputError(f"portfolio problem requires r >= 0, got {r!r}")
    if not endow.m1 > 0:
        raise InfeasibleEndowmentError("period-1 income must be positive: no borrowing instrument")

    alloc = solve_consumption(prefs, endow, r)
    if alloc.savings > 0:
        c1 = alloc.c1
        bonds = endow.m1 - c1
        c2 = endow.m2 + (1.0 + r) * bonds
        mu, _ = _multipliers(prefs, c1, c2, r)
        # bond condition holds with equality by construction of the Euler solve
        return PortfolioAllocation(c1, c2, 0.0, bonds, max(mu, 0.0), 0.0, r)

    c1, c2 = endow.m1, endow.m2
    if not c2 > 0:
        raise InfeasibleEndowmentError("corner allocation leaves zero period-2 consumption")
    mu, nu = _multipliers(prefs, c1, c2, r)
    return PortfolioAllocation(c1, c2, 0.0, 0.0, max(mu, 0.0), max(nu, 0.0), r)
