"""Command-line surface.

Subcommands: solve, expand, simulate, bound-check, spread-opt, multi.
Formats: json (versioned schema, full precision), csv (same values), human
(6 significant digits).  Exit codes: 0 success, 2 invalid input, 3 solver
failure (no root bracket / iteration cap / per-asset failure); with
``--strict`` a failed statistical tolerance exits 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from .closedform import DomainError
from .gap import (
    MaxIterExceededError,
    NoBracketError,
    SolverConfig,
    gap_leading_order,
    solve_gap,
    verify_asymptotic_order,
)
from .metrics import policy_metrics
from .multi import MultiAssetError, load_multi_json, solve_all, write_multi_csv
from .params import MarketParams, Preferences
from .shadow import ShadowModel
from .simulate import (
    Measure,
    OverflowGuardError,
    SimConfig,
    account_trades,
    dump_paths_csv,
    estimate_equivalent_annuity,
    simulate_reflected,
    verify_finite_horizon_bound,
)
from .spread import SpreadSearch, curves_to_csv, curves_to_plot_json, optimize_spread

SCHEMA_VERSION = "1"
SEED_ENV_VAR = "CARABAND_SEED"

__all__ = ["main", "SCHEMA_VERSION", "SEED_ENV_VAR"]


def _fmt_human(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _emit(report: dict, fmt: str, stream) -> None:
    """Write a report dict (flat scalars plus optional 'rows' table)."""
    rows = report.get("rows")
    scalars = {k: v for k, v in report.items() if k != "rows"}
    if fmt == "json":
        payload = {"schema_version": SCHEMA_VERSION, **report}
        json.dump(payload, stream, indent=2)
        stream.write("\n")
    elif fmt == "csv":
        writer = csv.writer(stream)
        writer.writerow(["key", "value"])
        writer.writerow(["schema_version", SCHEMA_VERSION])
        for k, v in scalars.items():
            writer.writerow([k, repr(v) if isinstance(v, float) else v])
        if rows:
            writer.writerow([])
            header = list(rows[0])
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(row[k]) if isinstance(row[k], float) else row[k]
                                 for k in header])
    else:
        width = max((len(k) for k in scalars), default=0)
        for k, v in scalars.items():
            stream.write(f"{k:<{width}}  {_fmt_human(v)}\n")
        if rows:
            stream.write("\n")
            header = list(rows[0])
            stream.write("  ".join(header) + "\n")
            for row in rows:
                stream.write("  ".join(_fmt_human(row[k]) for k in header) + "\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("json", "csv", "human"), default="human")
    parser.add_argument("--output", help="output file (default: stdout)")
    parser.add_argument("--config", help="JSON file with flag defaults")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap worker threads for numeric kernels")
    parser.add_argument("--strict", action="store_true",
                        help="exit 1 if any statistical check fails")


def _add_market(parser: argparse.ArgumentParser, alpha: bool = True) -> None:
    parser.add_argument("--mu", type=float, required=True, help="drift, 1/year")
    parser.add_argument("--sigma", type=float, required=True, help="volatility, 1/sqrt(year)")
    parser.add_argument("--eps", type=float, help="relative bid-ask spread")
    if alpha:
        parser.add_argument("--alpha", type=float, required=True,
                            help="absolute risk aversion, 1/dollar")


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caraband",
        description="No-trade band solver and Monte Carlo cross-validation "
                    "for long-run trading under proportional costs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="closed-form band, welfare and turnover")
    _add_market(p)
    p.add_argument("--business-time", action="store_true",
                   help="report rates per unit of business time (variance clock)")
    _add_common(p)

    p = sub.add_parser("expand", help="small-spread expansion diagnostics")
    _add_market(p, alpha=False)
    p.add_argument("--eps-grid", default="1e-4,3e-4,1e-3,3e-3,1e-2",
                   help="comma-separated spread grid")
    _add_common(p)

    p = sub.add_parser("simulate", help="ergodic Monte Carlo vs closed forms")
    _add_market(p)
    p.add_argument("--T", type=float, default=500.0, help="horizon, years")
    p.add_argument("--dt", type=float, default=1e-4, help="step, years")
    p.add_argument("--paths", type=int, default=64)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--measure", choices=("physical", "risk-neutral"), default="physical")
    p.add_argument("--y0", type=float, default=0.0, help="initial state coordinate")
    p.add_argument("--dump-paths", help="CSV file for subsampled path dumps")
    p.add_argument("--dump-stride", type=int, default=10000,
                   help="steps between dumped path samples")
    _add_common(p)

    p = sub.add_parser("bound-check", help="finite-horizon wealth identity check")
    _add_market(p)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--paths", type=int, default=100000)
    p.add_argument("--seed", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("spread-opt", help="dealer's optimal spread")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, default=1.0, help="book-price weight")
    p.add_argument("--lo", type=float, default=1e-4)
    p.add_argument("--hi", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--curve-csv", help="write the profit curve as CSV")
    p.add_argument("--plot-json", help="write log-log plot data as JSON")
    _add_common(p)

    p = sub.add_parser("multi", help="independent multi-asset aggregation")
    p.add_argument("--input", required=True,
                   help='JSON: {"alpha": a, "assets": [{"mu","sigma","epsilon"}]}')
    p.add_argument("--csv-out", help="write per-asset + TOTAL rows as CSV")
    _add_common(p)
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            overrides = json.load(fh)
        for key, value in overrides.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise ValueError(f"unknown config key {key!r}")
            # command-line flags win over the config file
            if getattr(args, attr) in (None, False):
                setattr(args, attr, value)


def _market(args) -> MarketParams:
    if args.eps is None:
        raise ValueError("--eps is required")
    return MarketParams(mu=args.mu, sigma=args.sigma, epsilon=args.eps)


def _cmd_solve(args) -> dict:
    market = _market(args)
    prefs = Preferences(alpha=args.alpha)
    gap = solve_gap(market, prefs)
    pm = policy_metrics(gap, market, prefs)
    scale = 1.0 / market.sigma**2 if args.business_time else 1.0
    return {
        "mu_bar": market.mu_bar,
        "lambda_bar": gap.lambda_bar,
        "a": gap.a,
        "b": gap.b,
        "branch": gap.branch.value,
        "residual": gap.residual,
        "l": gap.l,
        "u": gap.u,
        "eta_minus": pm.eta_minus,
        "eta_plus": pm.eta_plus,
        "ea": pm.ea * scale,
        "lip": pm.lip * scale,
        "sht": pm.sht * scale,
        "wet": pm.wet * scale,
        "wet_minus": pm.wet_minus * scale,
        "wet_plus": pm.wet_plus * scale,
        "lt_buy": pm.lt_buy * scale,
        "lt_sell": pm.lt_sell * scale,
        "avg_position": pm.avg_position,
        "alpha_hat": pm.alpha_hat,
        "universal_ratio": pm.lip / (market.epsilon * pm.sht),
        "business_time": bool(args.business_time),
    }


def _cmd_expand(args) -> dict:
    eps_grid = [float(tok) for tok in args.eps_grid.split(",") if tok.strip()]
    report = verify_asymptotic_order(args.mu, args.sigma, eps_grid)
    prefs = Preferences(alpha=1.0)
    rows = []
    for eps in report.eps_grid:
        market = MarketParams(mu=args.mu, sigma=args.sigma, epsilon=eps)
        gap = solve_gap(market, prefs)
        lead = gap_leading_order(market).lambda_leading
        rows.append({
            "epsilon": eps,
            "lambda_bar": gap.lambda_bar,
            "lambda_leading": lead,
            "remainder": gap.lambda_bar - lead,
        })
    return {"remainder_order": report.slope, "rows": rows}


def _cmd_simulate(args) -> dict:
    market = _market(args)
    prefs = Preferences(alpha=args.alpha)
    gap = solve_gap(market, prefs)
    pm = policy_metrics(gap, market, prefs)
    measure = Measure.RISK_NEUTRAL if args.measure == "risk-neutral" else Measure.PHYSICAL
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = SimConfig(horizon_years=args.T, dt_years=args.dt, n_paths=args.paths,
                    seed=seed, measure=measure, y0=args.y0)
    paths = simulate_reflected(gap, market, cfg)
    if args.dump_paths:
        dump_paths_csv(args.dump_paths, gap, market, cfg, args.dump_stride)
    res = account_trades(paths, gap, market, prefs, args.T)
    report = {"seed": seed, "paths": args.paths, "T": args.T, "dt": args.dt,
              "measure": args.measure}
    checks = []
    for name, est, closed in (
        ("sht", res.sht_estimate, pm.sht),
        ("wet", res.wet_estimate, pm.wet),
        ("lt_buy", res.lt_buy_estimate, pm.lt_buy),
        ("lt_sell", res.lt_sell_estimate, pm.lt_sell),
        ("avg_position", res.avg_position_estimate, pm.avg_position),
    ):
        z = (est.value - closed) / est.stderr if est.stderr > 0 else math.inf
        report[f"{name}_sim"] = est.value
        report[f"{name}_se"] = est.stderr
        report[f"{name}_closed"] = closed
        report[f"{name}_z"] = z
        # closed forms describe the physical stationary law only
        if measure is Measure.PHYSICAL:
            checks.append(abs(z) <= 3.0)
    try:
        ea = estimate_equivalent_annuity(paths, prefs, args.T)
        report["ea_sim"] = ea.value
        report["ea_se"] = ea.stderr
        report["ea_closed"] = pm.ea
        if measure is Measure.RISK_NEUTRAL:
            report["ea_ok"] = abs(ea.value - pm.ea) <= max(3 * ea.stderr, 0.02 * abs(pm.ea))
            checks.append(report["ea_ok"])
        else:
            # the plain exponential-utility estimator is heavy-tailed under
            # the physical measure; reported but not gated
            report["ea_note"] = "physical-measure estimate; use --measure risk-neutral"
    except OverflowGuardError as exc:
        report["ea_sim"] = None
        report["ea_note"] = str(exc)
    report["pass"] = all(checks)
    return report


def _cmd_bound_check(args) -> dict:
    market = _market(args)
    prefs = Preferences(alpha=args.alpha)
    gap = solve_gap(market, prefs)
    model = ShadowModel(gap=gap, market=market)
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = SimConfig(horizon_years=args.T, dt_years=args.dt, n_paths=args.paths, seed=seed)
    rep = verify_finite_horizon_bound(gap, model, market, prefs, cfg)
    return {
        "seed": seed, "paths": args.paths, "T": args.T, "dt": args.dt,
        "lhs": rep.lhs.value, "lhs_se": rep.lhs.stderr,
        "rhs": rep.rhs.value, "rhs_se": rep.rhs.stderr,
        "z": rep.z_score, "q_abs_max": rep.q_abs_max,
        "pass": abs(rep.z_score) <= 3.0,
    }


def _cmd_spread_opt(args) -> dict:
    prefs = Preferences(alpha=args.alpha)
    search = SpreadSearch(lo=args.lo, hi=args.hi, n_grid=args.grid, tol=args.tol)
    eps_star, prof_star, curve = optimize_spread(args.mu, args.sigma, prefs,
                                                 args.delta, search)
    if args.curve_csv:
        curves_to_csv(args.curve_csv, [curve])
    if args.plot_json:
        curves_to_plot_json(args.plot_json, [curve])
    rows = [{"epsilon": p.epsilon, "profit": p.profit, "lambda_bar": p.lambda_bar,
             "wet_minus": p.wet_minus, "wet_plus": p.wet_plus}
            for p in curve.points]
    return {"delta": args.delta, "eps_star": eps_star, "profit_star": prof_star,
            "rows": rows}


def _cmd_multi(args) -> dict:
    multi = load_multi_json(args.input)
    result = solve_all(multi)
    if args.csv_out:
        write_multi_csv(args.csv_out, result)
    rows = [{
        "asset": r.index, "mu": r.market.mu, "sigma": r.market.sigma,
        "epsilon": r.market.epsilon, "lambda_bar": r.gap.lambda_bar,
        "l": r.gap.l, "u": r.gap.u, "ea": r.metrics.ea,
        "sht": r.metrics.sht, "wet": r.metrics.wet,
    } for r in result.per_asset]
    return {"total_ea": result.total_ea, "total_wet": result.total_wet,
            "total_sht": result.total_sht, "rows": rows}


_COMMANDS = {
    "solve": _cmd_solve,
    "expand": _cmd_expand,
    "simulate": _cmd_simulate,
    "bound-check": _cmd_bound_check,
    "spread-opt": _cmd_spread_opt,
    "multi": _cmd_multi,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.threads is not None:
            if args.threads < 1:
                raise ValueError("--threads must be >= 1")
            import numba
            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
        report = _COMMANDS[args.command](args)
    except (ValueError, DomainError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NoBracketError, MaxIterExceededError, MultiAssetError, OverflowGuardError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3

    buf = io.StringIO()
    _emit(report, args.format, buf)
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.strict and report.get("pass") is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
