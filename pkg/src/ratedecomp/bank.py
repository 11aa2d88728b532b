"""Lending rate of a note-issuing bank with a real redemption obligation.

A loan of size ``L`` is funded by issuing notes ``N = L``. The bank holds a
redemption reserve ``r*(L)`` at opportunity cost ``kappa`` per unit per loan
period, which adds the encumbrance premium ``phi = kappa * r*(L) / L`` to the
risk-free rate and the expected default loss.

Nothing here takes a ``Preferences`` argument: ``phi`` is a balance-sheet
cost and does not involve the discount factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .credit import DefaultRisk, risk_premium_first_order
from .errors import InputError
from .numerics import binomial_quantile

DEFAULT_FAILURE_TOLERANCE = 0.01
TWO_TERM_THRESHOLD = 1e-12


@dataclass(frozen=True)
class LinearReserve:
    ratio: float

    def __post_init__(self):
        if not (self.ratio >= 0 and math.isfinite(self.ratio)):
            raise InputError(f"reserve ratio must be >= 0, got {self.ratio!r}")

    def required_reserve(self, L: float) -> float:
        _check_loan(L)
        return self.ratio * L


@dataclass(frozen=True)
class BinomialQuantileReserve:
    """Reserve sized to the ``1 - failure_tolerance`` quantile of presented notes.

    Each of the ``floor(L / note_unit)`` outstanding note units is presented
    independently with probability ``presentation_prob`` over the loan's life.
    When notes may be presented at all, at least one unit is held, so any
    positive issue carries a positive reserve.
    """

    presentation_prob: float
    failure_tolerance: float = DEFAULT_FAILURE_TOLERANCE
    note_unit: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.presentation_prob <= 1.0:
            raise InputError(f"presentation probability must lie in [0, 1], got {self.presentation_prob!r}")
        if not 0.0 < self.failure_tolerance < 1.0:
            raise InputError(f"failure tolerance must lie in (0, 1), got {self.failure_tolerance!r}")
        if not (self.note_unit > 0 and math.isfinite(self.note_unit)):
            raise InputError(f"note unit must be positive, got {self.note_unit!r}")

    def required_reserve(self, L: float) -> float:
        _check_loan(L)
        if L == 0 or self.presentation_prob == 0:
            return 0.0
        n_notes = math.floor(L / self.note_unit)
        k = binomial_quantile(n_notes, self.presentation_prob, 1.0 - self.failure_tolerance)
        return self.note_unit * max(k, 1)


ReserveRule = Union[LinearReserve, BinomialQuantileReserve]


def _check_loan(L):
    if not (L >= 0 and math.isfinite(L)):
        raise InputError(f"loan size must be >= 0, got {L!r}")


def required_reserve(rule: ReserveRule, L: float) -> float:
    return rule.required_reserve(L)


def encumbrance_premium(kappa: float, rule: ReserveRule, L: float) -> float:
    """``kappa * r*(L) / L``; zero for ``L = 0``, where no notes are issued."""
    if not (L >= 0 and math.isfinite(L)):
        raise InputError(f"loan size must be >= 0, got {L!r}")
    if not (kappa >= 0 and math.isfinite(kappa)):
        raise InputError(f"kappa must be >= 0, got {kappa!r}")
    if L == 0:
        return 0.0
    return kappa * rule.required_reserve(L) / L


@dataclass(frozen=True)
class BankParams:
    kappa: float
    loan_size: float
    risk: DefaultRisk
    rule: ReserveRule

    def __post_init__(self):
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise InputError(f"kappa must be >= 0, got {self.kappa!r}")
        if not (self.loan_size > 0 and math.isfinite(self.loan_size)):
            raise InputError(f"loan size must be positive, got {self.loan_size!r}")


@dataclass(frozen=True)
class ThreeTermDecomposition:
    time_preference: float
    risk_premium: float
    phi: float

    @property
    def total(self) -> float:
        return self.time_preference + self.risk_premium + self.phi


def lending_rate(r_f: float, params: BankParams) -> ThreeTermDecomposition:
    """Competitive lending rate ``r_f + pi * lam + phi``.

    The default term is the first-order expected loss, added rather than
    compounded with ``r_f``.
    """
    if not math.isfinite(r_f):
        raise InputError(f"risk-free rate must be finite, got {r_f!r}")
    return ThreeTermDecomposition(
        time_preference=r_f,
        risk_premium=risk_premium_first_order(params.risk),
        phi=encumbrance_premium(params.kappa, params.rule, params.loan_size),
    )


def two_term_limit_check(r_f: float, params: BankParams) -> bool:
    """True when ``phi`` vanishes and the rate reduces to ``r_f + pi * lam``."""
    return lending_rate(r_f, params).phi <= TWO_TERM_THRESHOLD
