"""Synthetic bank panels and the identification experiment for ``phi``.

Each bank-period draws default probability, loss given default and
redemption intensity uniformly from the configured ranges. The observed
spread over the risk-free rate is ``pi * lam + phi + noise``.

* ``FREE_BANKING``: ``phi = kappa * r*(L) / L`` with the reserve proxy driven
  by redemption intensity, independent of default fundamentals.
* ``FIAT_NO_REDEMPTION``: the proxy is still recorded but ``phi = 0``.
* ``FIAT_BACKSTOP_COLLINEAR``: the proxy is a fixed multiple of the default
  loss, so its price cannot be told apart from the risk premium.

Per-row randomness comes from ``numpy.random.default_rng([seed, bank_id,
period])`` (SeedSequence mixing), so rows do not depend on generation order.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .bank import DEFAULT_FAILURE_TOLERANCE, BinomialQuantileReserve
from .errors import ConfigError
from .numerics import ols_fit

SCHEMA_VERSION = 1
IDENTIFICATION_CONDITION_LIMIT = 1e8
CSV_HEADER = ("bank_id", "period", "observed_spread", "default_loss", "redemption_proxy", "regime")


class Regime(enum.Enum):
    FREE_BANKING = "free_banking"
    FIAT_NO_REDEMPTION = "fiat_no_redemption"
    FIAT_BACKSTOP_COLLINEAR = "fiat_backstop_collinear"


def _as_range(name, value, lo, hi):
    try:
        a, b = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a pair of numbers, got {value!r}") from None
    if not (lo <= a <= b <= hi):
        raise ConfigError(f"{name} must satisfy {lo} <= low <= high <= {hi}, got {value!r}")
    return (a, b)


@dataclass(frozen=True)
class RegimeConfig:
    regime: Regime = Regime.FREE_BANKING
    n_banks: int = 50
    n_periods: int = 100
    r_f: float = 0.03
    kappa_true: float = 0.05
    pi_range: tuple[float, float] = (0.005, 0.05)
    lambda_range: tuple[float, float] = (0.2, 0.8)
    q_range: tuple[float, float] = (0.02, 0.15)
    noise_sd: float = 0.002
    seed: int = 0
    loan_size: float = 1000.0
    note_unit: float = 1.0
    failure_tolerance: float = DEFAULT_FAILURE_TOLERANCE
    # proxy = collinear_scale * default_loss under the backstop regime
    collinear_scale: float = 10.0

    def __post_init__(self):
        if not isinstance(self.regime, Regime):
            try:
                object.__setattr__(self, "regime", Regime(self.regime))
            except ValueError:
                raise ConfigError(f"unknown regime {self.regime!r}") from None
        for name in ("n_banks", "n_periods"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.n_banks * self.n_periods < 10:
            raise ConfigError("need at least 10 bank-period observations")
        object.__setattr__(self, "pi_range", _as_range("pi_range", self.pi_range, 0.0, 1.0))
        object.__setattr__(self, "lambda_range", _as_range("lambda_range", self.lambda_range, 0.0, 1.0))
        object.__setattr__(self, "q_range", _as_range("q_range", self.q_range, 0.0, 1.0))
        if self.pi_range[1] * self.lambda_range[1] >= 1.0:
            raise ConfigError("pi * lambda must stay below 1")
        checks = {
            "kappa_true": self.kappa_true >= 0,
            "noise_sd": self.noise_sd >= 0,
            "loan_size": self.loan_size > 0,
            "note_unit": self.note_unit > 0,
            "failure_tolerance": 0 < self.failure_tolerance < 1,
            "collinear_scale": self.collinear_scale > 0,
            "r_f": self.r_f > -1,
        }
        for name, ok in checks.items():
            if not (ok and math.isfinite(getattr(self, name))):
                raise ConfigError(f"invalid {name}: {getattr(self, name)!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        for key in ("pi_range", "lambda_range", "q_range"):
            d[key] = list(d[key])
        return {"schema_version": SCHEMA_VERSION, **d}

    @classmethod
    def from_dict(cls, data: dict) -> RegimeConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        version = data.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def with_seed(self, seed: int) -> RegimeConfig:
        return replace(self, seed=seed)


PRESETS = {
    "free_banking": RegimeConfig(Regime.FREE_BANKING),
    "fiat_no_redemption": RegimeConfig(Regime.FIAT_NO_REDEMPTION),
    "fiat_backstop_collinear": RegimeConfig(Regime.FIAT_BACKSTOP_COLLINEAR),
}


class PanelRow(NamedTuple):
    bank_id: int
    period: int
    observed_spread: float
    default_loss: float
    redemption_proxy: float
    regime: str


@dataclass(frozen=True)
class PanelDataset:
    rows: tuple[PanelRow, ...]
    config: RegimeConfig | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        idx = PanelRow._fields.index(name)
        return np.array([row[idx] for row in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow([
                row.bank_id,
                row.period,
                format_number(row.observed_spread),
                format_number(row.default_loss),
                format_number(row.redemption_proxy),
                row.regime,
            ])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> PanelDataset:
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise ConfigError(f"panel CSV header must be {','.join(CSV_HEADER)}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            try:
                rows.append(PanelRow(int(rec[0]), int(rec[1]), float(rec[2]), float(rec[3]), float(rec[4]), rec[5]))
            except (ValueError, IndexError):
                raise ConfigError(f"malformed panel row {rec!r}") from None
        return cls(tuple(rows))


def format_number(x: float) -> str:
    """12 significant digits, positional notation."""
    # adding 0.0 turns -0.0 into 0.0
    return np.format_float_positional(float(x) + 0.0, precision=12, unique=False, fractional=False, trim="-")


def _draw_row(cfg: RegimeConfig, bank_id: int, period: int) -> PanelRow:
    rng = np.random.default_rng([cfg.seed, bank_id, period])
    u = rng.random(3)
    z = rng.standard_normal()
    pi = cfg.pi_range[0] + (cfg.pi_range[1] - cfg.pi_range[0]) * u[0]
    lam = cfg.lambda_range[0] + (cfg.lambda_range[1] - cfg.lambda_range[0]) * u[1]
    q = cfg.q_range[0] + (cfg.q_range[1] - cfg.q_range[0]) * u[2]
    default_loss = float(pi * lam)

    if cfg.regime is Regime.FIAT_BACKSTOP_COLLINEAR:
        proxy = cfg.collinear_scale * default_loss
    else:
        rule = BinomialQuantileReserve(float(q), cfg.failure_tolerance, cfg.note_unit)
        proxy = rule.required_reserve(cfg.loan_size) / cfg.loan_size
    kappa = 0.0 if cfg.regime is Regime.FIAT_NO_REDEMPTION else cfg.kappa_true
    spread = default_loss + kappa * proxy + cfg.noise_sd * float(z)
    return PanelRow(bank_id, period, spread, default_loss, proxy, cfg.regime.value)


def generate_panel(config: RegimeConfig) -> PanelDataset:
    rows = tuple(
        _draw_row(config, b, t)
        for b in range(config.n_banks)
        for t in range(config.n_periods)
    )
    return PanelDataset(rows, config)


@dataclass(frozen=True)
class IdentificationReport:
    kappa_hat: float
    kappa_se: float
    default_coef: float
    condition_number: float
    identified: bool

    def to_dict(self) -> dict:
        def num(x):
            return float(f"{x:.12g}") if math.isfinite(x) else None

        return {
            "kappa_hat": num(self.kappa_hat),
            "kappa_se": num(self.kappa_se),
            "default_coef": num(self.default_coef),
            "condition_number": num(self.condition_number),
            "identified": self.identified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> IdentificationReport:
        def num(x):
            return math.inf if x is None else float(x)

        return cls(num(d["kappa_hat"]), num(d["kappa_se"]), num(d["default_coef"]),
                   num(d["condition_number"]), bool(d["identified"]))


def estimate(dataset: PanelDataset) -> IdentificationReport:
    """Pooled OLS of the spread on an intercept, default loss and reserve proxy."""
    if len(dataset) < 3:
        raise ConfigError("need at least three observations to estimate")
    y = dataset.column("observed_spread")
    X = np.column_stack([
        np.ones_like(y),
        dataset.column("default_loss"),
        dataset.column("redemption_proxy"),
    ])
    fit = ols_fit(X, y)
    kappa_se = float(fit.standard_errors[2])
    identified = fit.condition_number < IDENTIFICATION_CONDITION_LIMIT and math.isfinite(kappa_se)
    return IdentificationReport(
        kappa_hat=float(fit.coefficients[2]),
        kappa_se=kappa_se,
        default_coef=float(fit.coefficients[1]),
        condition_number=float(fit.condition_number),
        identified=bool(identified),
    )


def run_experiment(config: RegimeConfig) -> IdentificationReport:
    return estimate(generate_panel(config))
