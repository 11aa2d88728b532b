"""Command-line front end.

Exit codes: 0 success, 2 invalid input (including bad flags and unreadable
configs), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bank import BankParams, BinomialQuantileReserve, LinearReserve, lending_rate
from .cliometrics import RegimeConfig, estimate, format_number, generate_panel
from .consumer import (
    Endowment,
    Preferences,
    UtilityFamily,
    euler_residual,
    savings_response,
    solve_consumption,
)
from .credit import DefaultRisk, risk_premium_first_order, risky_rate_exact
from .errors import ComputationError, ConfigError, InputError
from .portfolio import solve_portfolio

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTATION = 3
DEFAULT_LOAN = 1000.0


# -- output -----------------------------------------------------------------

def _table_cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.4f}" if math.isfinite(v) else str(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(f"{v + 0.0:.12g}") if math.isfinite(v) else None
    return v


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format_number(v)
    return str(v)


def render(records: list[dict], fmt: str, single: bool) -> str:
    """Format ``records`` (dicts sharing keys) as an aligned table, JSON or CSV."""
    keys = list(records[0])
    if fmt == "json":
        data = [{k: _json_value(r[k]) for k in keys} for r in records]
        return json.dumps(data[0] if single else data, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in records:
            w.writerow([_csv_cell(r[k]) for k in keys])
        return buf.getvalue()
    if single:
        rows = [(k, _table_cell(records[0][k])) for k in keys]
        kw = max(len(k) for k, _ in rows)
        vw = max(len(v) for _, v in rows)
        return "".join(f"{k:<{kw}}  {v:>{vw}}\n" for k, v in rows)
    cells = [[_table_cell(r[k]) for k in keys] for r in records]
    widths = [max(len(k), *(len(row[i]) for row in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(f"{k:>{w}}" for k, w in zip(keys, widths))]
    lines += ["  ".join(f"{c:>{w}}" for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None, stdout) -> None:
    if output is None:
        stdout.write(text)
        return
    try:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise InputError(f"cannot write {output}: {exc}") from None


# -- parameter blocks -------------------------------------------------------

def _preferences(args) -> Preferences:
    if args.utility == "log":
        util = UtilityFamily.log() if args.sigma is None else UtilityFamily(ies_sigma=args.sigma)
    else:
        if args.sigma is None:
            raise InputError("--utility ies needs --sigma")
        util = UtilityFamily.constant_ies(args.sigma)
    return Preferences(args.rho, util)


def _endowment(args) -> Endowment:
    return Endowment(args.m1, args.m2)


def parse_reserve(text: str):
    """``linear:RATIO`` or ``binomial:Q[:EPS[:UNIT]]``."""
    kind, _, rest = text.partition(":")
    try:
        nums = [float(x) for x in rest.split(":")] if rest else []
    except ValueError:
        raise InputError(f"bad reserve {text!r}") from None
    if kind == "linear" and len(nums) == 1:
        return LinearReserve(nums[0])
    if kind == "binomial" and 1 <= len(nums) <= 3:
        return BinomialQuantileReserve(*nums)
    raise InputError(f"reserve must be linear:RATIO or binomial:Q[:EPS[:UNIT]], got {text!r}")


# -- commands ---------------------------------------------------------------

def cmd_solve(args) -> tuple[list[dict], bool]:
    prefs, endow = _preferences(args), _endowment(args)
    a = solve_consumption(prefs, endow, args.r)
    return [{
        "r": a.r,
        "wealth": a.wealth,
        "c1": a.c1,
        "c2": a.c2,
        "s": a.savings,
        "euler_residual": euler_residual(prefs, a),
    }], True


def cmd_portfolio(args) -> tuple[list[dict], bool]:
    prefs, endow = _preferences(args), _endowment(args)
    p = solve_portfolio(prefs, endow, args.r)
    return [{
        "r": p.r,
        "c1": p.c1,
        "c2": p.c2,
        "cash": p.cash,
        "bonds": p.bonds,
        "s": p.savings,
        "kkt_mu": p.kkt_mu,
        "kkt_nu": p.kkt_nu,
    }], True


def cmd_sweep(args) -> tuple[list[dict], bool]:
    if args.r_steps < 1:
        raise InputError(f"--r-steps must be at least 1, got {args.r_steps}")
    prefs, endow = _preferences(args), _endowment(args)
    records = []
    for r in np.linspace(args.r_from, args.r_to, args.r_steps):
        r = float(r)
        a = solve_consumption(prefs, endow, r)
        records.append({"r": r, "c1": a.c1, "c2": a.c2, "s": a.savings,
                        "ds_dr": savings_response(prefs, endow, r)})
    return records, False


def cmd_price(args) -> tuple[list[dict], bool]:
    risk = DefaultRisk(args.pi, args.lam)
    exact = risky_rate_exact(args.rf, risk)
    rec = {
        "r_f": args.rf,
        "risky_rate_exact": exact,
        "spread_exact": exact - args.rf,
        "spread_first_order": risk_premium_first_order(risk),
    }
    bank_flags = (args.kappa, args.reserve, args.loan)
    if any(f is not None for f in bank_flags):
        if args.kappa is None or args.reserve is None:
            raise InputError("bank pricing needs both --kappa and --reserve")
        params = BankParams(args.kappa, DEFAULT_LOAN if args.loan is None else args.loan,
                            risk, parse_reserve(args.reserve))
        d = lending_rate(args.rf, params)
        rec.update(time_preference=d.time_preference, risk_premium=d.risk_premium,
                   phi=d.phi, lending_rate=d.total)
    return [rec], True


def load_config(path: str) -> RegimeConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return RegimeConfig.from_dict(data)


def cmd_experiment(args) -> tuple[list[dict], bool]:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    panel = generate_panel(cfg)
    if args.panel_out:
        _emit(panel.to_csv(), args.panel_out, None)
    rep = estimate(panel)
    return [{
        "kappa_hat": rep.kappa_hat,
        "kappa_se": rep.kappa_se,
        "default_coef": rep.default_coef,
        "condition_number": rep.condition_number,
        "identified": rep.identified,
    }], True


DEFAULT_FORMAT = {"sweep": "csv", "experiment": "json"}


# -- parser -----------------------------------------------------------------

def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _global_flags(parser, suppress: bool) -> None:
    # on subparsers the defaults are suppressed so flags given before the
    # subcommand are not overwritten
    kw = {"default": argparse.SUPPRESS} if suppress else {"default": None}
    parser.add_argument("--format", choices=("table", "json", "csv"), **kw)
    parser.add_argument("--output", metavar="PATH", **kw)
    parser.add_argument("--seed", type=_seed, **kw)


def _consumer_flags(p) -> None:
    p.add_argument("--utility", choices=("log", "ies"), default="log")
    p.add_argument("--sigma", type=float, help="intertemporal elasticity (ies only)")
    p.add_argument("--rho", type=float, required=True, help="rate of time preference")
    p.add_argument("--m1", type=float, required=True)
    p.add_argument("--m2", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratedecomp", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="two-period consumption choice")
    _consumer_flags(p)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("portfolio", help="cash/bond allocation with KKT multipliers")
    _consumer_flags(p)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_portfolio)

    p = sub.add_parser("sweep", help="savings curve over an interest-rate grid")
    _consumer_flags(p)
    p.add_argument("--r-from", type=float, required=True)
    p.add_argument("--r-to", type=float, required=True)
    p.add_argument("--r-steps", type=int, required=True, help="number of grid points, endpoints included")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("price", help="risky rate and bank lending-rate decomposition")
    p.add_argument("--rf", type=float, required=True)
    p.add_argument("--pi", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--kappa", type=float)
    p.add_argument("--reserve", help="linear:RATIO or binomial:Q[:EPS[:UNIT]]")
    p.add_argument("--loan", type=float, help=f"loan size (default {DEFAULT_LOAN:g})")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("experiment", help="simulate a panel and test identification")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--panel-out", metavar="PATH")
    p.set_defaults(func=cmd_experiment)

    for sp in sub.choices.values():
        _global_flags(sp, suppress=True)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    fmt = args.format or DEFAULT_FORMAT.get(args.command, "table")
    try:
        records, single = args.func(args)
        _emit(render(records, fmt, single), args.output, stdout)
    except InputError as exc:
        print(f"ratedecomp {args.command}: error: {exc}", file=stderr)
        return EXIT_INPUT
    except ComputationError as exc:
        print(f"ratedecomp {args.command}: computation failed: {exc}", file=stderr)
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
