"""One-period defaultable bond priced by a risk-neutral lender.

Indifference with the risk-free bond requires equal expected gross returns,
``(1 + r_tilde)(1 - pi * lam) = 1 + r_f``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnpriceableError


@dataclass(frozen=True)
class DefaultRisk:
    pi: float
    lam: float

    def __post_init__(self):
        if not 0.0 <= self.pi <= 1.0:
            raise InputError(f"default probability must lie in [0, 1], got {self.pi!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise InputError(f"loss given default must lie in [0, 1], got {self.lam!r}")

    @property
    def expected_loss(self) -> float:
        return self.pi * self.lam


def risky_rate_exact(r_f: float, risk: DefaultRisk, premium_adjustment: float = 0.0) -> float:
    """Promised rate ``(1 + r_f) / (1 - pi * lam) - 1``.

    ``premium_adjustment`` is an additive spread for lender risk aversion;
    no functional form for it is assumed here, so it defaults to zero.
    """
    if not r_f > -1:
        raise InputError(f"risk-free rate must exceed -1, got {r_f!r}")
    loss = risk.expected_loss
    if loss >= 1.0:
        raise UnpriceableError("pi * lambda >= 1: the bond is expected to lose everything")
    return (1.0 + r_f) / (1.0 - loss) - 1.0 + premium_adjustment


def risk_premium_first_order(risk: DefaultRisk) -> float:
    return risk.expected_loss


def expected_gross_return(r_tilde: float, risk: DefaultRisk) -> float:
    gross = 1.0 + r_tilde
    return (1.0 - risk.pi) * gross + risk.pi * gross * (1.0 - risk.lam)


def simulate_default_returns(r_tilde: float, risk: DefaultRisk, n: int, seed: int) -> float:
    """Mean realised gross return over ``n`` seeded Bernoulli(pi) default draws."""
    if n < 1:
        raise InputError("need at least one draw")
    rng = np.random.default_rng(seed)
    n_default = int(np.count_nonzero(rng.random(int(n)) < risk.pi))
    # payoff is (1 + r_tilde) or (1 + r_tilde)(1 - lam); average via the count
    return (1.0 + r_tilde) * (1.0 - risk.lam * (n_default / n))
