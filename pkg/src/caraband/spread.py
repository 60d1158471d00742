"""Spread-setting problem of a competitive market maker.

The dealer quotes a relative spread eps and earns the fee flow on both sides
of the investor's long-run trading volume.  Valuing inventory at the book
price S * (1 - eps * delta) (delta = 0: ask, delta = 1: bid), average profits
per year are

    prof(eps) = eps * (delta * wet_minus + (1 - delta) / (1 - eps) * wet_plus).

Profits scale as 1/alpha uniformly in eps, so the maximizing spread is
independent of the investor's risk aversion.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .gap import NoBracketError, SolverConfig, solve_gap
from .metrics import absolute_turnover
from .params import MarketParams, Preferences

__all__ = [
    "BookConvention",
    "SpreadPoint",
    "SpreadCurve",
    "SpreadSearch",
    "NotUnimodalWarning",
    "profit",
    "optimize_spread",
    "curves_to_csv",
    "curves_to_plot_json",
]


class NotUnimodalWarning(UserWarning):
    """Profit grid shows multiple local maxima; the global grid max is used."""


@dataclass(frozen=True)
class BookConvention:
    """Inventory valuation weight: book price S * (1 - epsilon * delta)."""

    delta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")

    def book_price(self, s: float, epsilon: float) -> float:
        return s * (1.0 - epsilon * self.delta)


@dataclass(frozen=True)
class SpreadPoint:
    epsilon: float
    profit: float       # dollars/year
    lambda_bar: float
    wet_minus: float    # dollars bought/year
    wet_plus: float     # dollars sold/year


@dataclass(frozen=True)
class SpreadCurve:
    """Profit curve over solvable spreads for one book convention."""

    delta: float
    points: tuple  # SpreadPoint, sorted by epsilon

    def __post_init__(self) -> None:
        eps = [p.epsilon for p in self.points]
        if eps != sorted(eps):
            raise ValueError("curve points must be sorted by epsilon")
        if not all(math.isfinite(p.profit) for p in self.points):
            raise ValueError("curve profits must be finite")


@dataclass(frozen=True)
class SpreadSearch:
    lo: float = 1e-4
    hi: float = 0.5
    n_grid: int = 60          # log-spaced scan points
    tol: float = 1e-5         # absolute tolerance in epsilon for refinement
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self) -> None:
        if not 0.0 < self.lo < self.hi < 1.0:
            raise ValueError("need 0 < lo < hi < 1")
        if self.n_grid < 4:
            raise ValueError("n_grid must be >= 4")


def profit(mu: float, sigma: float, prefs: Preferences, epsilon: float,
           delta: float, solver: SolverConfig = SolverConfig()) -> float:
    """Dealer's average profit in dollars/year at the given spread."""
    conv = BookConvention(delta=delta)
    market = MarketParams(mu=mu, sigma=sigma, epsilon=epsilon)
    gap = solve_gap(market, prefs, solver)
    _, wet_minus, wet_plus = absolute_turnover(gap, market, prefs)
    return epsilon * (conv.delta * wet_minus
                      + (1.0 - conv.delta) / (1.0 - epsilon) * wet_plus)


def _profit_point(mu, sigma, prefs, epsilon, delta, solver):
    market = MarketParams(mu=mu, sigma=sigma, epsilon=epsilon)
    gap = solve_gap(market, prefs, solver)
    _, wet_minus, wet_plus = absolute_turnover(gap, market, prefs)
    prof = epsilon * (delta * wet_minus + (1.0 - delta) / (1.0 - epsilon) * wet_plus)
    return SpreadPoint(epsilon=epsilon, profit=prof, lambda_bar=gap.lambda_bar,
                       wet_minus=wet_minus, wet_plus=wet_plus)


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximization on [lo, hi] to absolute tolerance tol."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimize_spread(mu: float, sigma: float, prefs: Preferences, delta: float,
                    search: SpreadSearch = SpreadSearch()):
    """Maximize dealer profit over the spread; returns (eps_star, prof_star, curve).

    Log-spaced grid scan over the solvable range, unimodality check, then
    golden-section refinement around the grid maximum.  Spreads where the gap
    equation has no solution are excluded with a warning, not extrapolated.
    """
    BookConvention(delta=delta)  # validate
    grid = np.geomspace(search.lo, search.hi, search.n_grid)
    points = []
    skipped = []
    for eps in grid:
        try:
            points.append(_profit_point(mu, sigma, prefs, float(eps), delta, search.solver))
        except NoBracketError:
            skipped.append(float(eps))
    if skipped:
        warnings.warn(
            f"{len(skipped)} spread(s) outside the solvable range excluded "
            f"(largest {max(skipped):.4g})",
            stacklevel=2,
        )
    if len(points) < 3:
        raise NoBracketError("too few solvable spreads in the search interval")
    curve = SpreadCurve(delta=delta, points=tuple(points))

    profs = np.array([p.profit for p in points])
    interior_max = (profs[1:-1] > profs[:-2]) & (profs[1:-1] >= profs[2:])
    n_local = int(interior_max.sum()) + int(profs[0] > profs[1]) + int(profs[-1] > profs[-2])
    i = int(np.argmax(profs))
    if n_local > 1:
        warnings.warn("profit grid is not unimodal; returning the global grid maximum",
                      NotUnimodalWarning, stacklevel=2)
        return points[i].epsilon, points[i].profit, curve

    lo = points[max(i - 1, 0)].epsilon
    hi = points[min(i + 1, len(points) - 1)].epsilon

    def f(eps: float) -> float:
        try:
            return profit(mu, sigma, prefs, eps, delta, search.solver)
        except NoBracketError:
            return -math.inf

    eps_star = _golden_max(f, lo, hi, search.tol)
    return eps_star, f(eps_star), curve


def curves_to_csv(filename: str, curves) -> None:
    """Long-format CSV with a delta column, one row per (delta, epsilon)."""
    with open(filename, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epsilon", "profit", "lambda_bar", "wet_minus", "wet_plus", "delta"])
        for curve in curves:
            for p in curve.points:
                writer.writerow([repr(p.epsilon), repr(p.profit), repr(p.lambda_bar),
                                 repr(p.wet_minus), repr(p.wet_plus), repr(curve.delta)])


def curves_to_plot_json(filename: str, curves) -> None:
    """Plot-data JSON: log-log profit curves, one series per book convention."""
    payload = {
        "xlabel": "spread epsilon",
        "ylabel": "profit, dollars/year",
        "xscale": "log",
        "yscale": "log",
        "series": [
            {
                "delta": curve.delta,
                "epsilon": [p.epsilon for p in curve.points],
                "profit": [p.profit for p in curve.points],
            }
            for curve in curves
        ],
    }
    with open(filename, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
