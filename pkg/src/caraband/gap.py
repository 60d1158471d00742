"""Scalar root-finding for the gap and its small-spread asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closedform import GapSolution, boundary_residual, make_gap_solution
from .params import MarketParams, Preferences

__all__ = [
    "SolverConfig",
    "GapAsymptotics",
    "OrderReport",
    "NoBracketError",
    "MaxIterExceededError",
    "gap_leading_order",
    "solve_gap",
    "verify_asymptotic_order",
]


class NoBracketError(RuntimeError):
    """The residual does not change sign on the search bracket.

    Signals a spread outside the small-spread regime of the closed-form
    solution; the solver reports instead of extrapolating.
    """


class MaxIterExceededError(RuntimeError):
    """Iteration cap reached before the residual tolerance."""


@dataclass(frozen=True)
class SolverConfig:
    tol_residual: float = 1e-12  # absolute tolerance on the terminal residual
    max_iter: int = 200
    bracket_shrink: float = 0.5  # initial bracket: [shrink, 1/shrink] * leading order

    def __post_init__(self) -> None:
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 < self.bracket_shrink < 1.0:
            raise ValueError("bracket_shrink must be in (0, 1)")


@dataclass(frozen=True)
class GapAsymptotics:
    """Leading fractional-power term of the gap, (3/4 mu_bar^2)^(1/3) eps^(1/3)."""

    lambda_leading: float
    order: int = field(default=1)  # expansion order retained


def gap_leading_order(market: MarketParams) -> GapAsymptotics:
    lead = (0.75 * market.mu_bar**2) ** (1.0 / 3.0) * market.epsilon ** (1.0 / 3.0)
    return GapAsymptotics(lambda_leading=lead)


def _bisect_secant(f, lo: float, hi: float, flo: float, fhi: float, cfg: SolverConfig):
    """Bracketed bisection with secant acceleration.

    Keeps a sign-change bracket at all times; a secant proposal is accepted
    only if it lands strictly inside the current bracket, otherwise the step
    falls back to bisection.  A stall guard forces a bisection step whenever
    two consecutive secant steps move the same endpoint (false-position
    stagnation against a steep residual).  Terminates on the residual
    tolerance.
    """
    x, fx = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    last_side, stalled = 0, 0
    for _ in range(cfg.max_iter):
        if abs(fx) <= cfg.tol_residual:
            return x, fx
        cand = 0.5 * (lo + hi)
        if stalled < 2 and math.isfinite(flo) and math.isfinite(fhi) and fhi != flo:
            sec = hi - fhi * (hi - lo) / (fhi - flo)
            if lo < sec < hi:
                cand = sec
        x = cand
        fx = f(x)
        # +inf residual (pole before the terminal point) counts as positive
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
            side = -1
        else:
            hi, fhi = x, fx
            side = 1
        stalled = stalled + 1 if side == last_side else 0
        last_side = side
        if hi - lo <= 1e-17 * max(1.0, hi):
            # bracket exhausted at machine precision
            if abs(fx) <= max(cfg.tol_residual, 1e-11):
                return x, fx
            break
    raise MaxIterExceededError(
        f"no convergence to residual {cfg.tol_residual:g} in {cfg.max_iter} iterations"
    )


def solve_gap(
    market: MarketParams,
    prefs: Preferences,
    cfg: SolverConfig = SolverConfig(),
) -> GapSolution:
    """Solve the terminal condition w(lam, log(u/l)) = mu_bar + lam for the gap."""
    mu_bar, eps = market.mu_bar, market.epsilon

    def f(lam: float) -> float:
        return boundary_residual(mu_bar, eps, lam)

    lead = gap_leading_order(market).lambda_leading
    lo = cfg.bracket_shrink * lead
    hi = min(lead / cfg.bracket_shrink, 0.999 * mu_bar)
    lo = min(lo, 0.5 * hi)
    flo, fhi = f(lo), f(hi)
    if not (np.sign(flo) != np.sign(fhi) and math.isfinite(flo)):
        # widen once toward (0, 0.999 mu_bar)
        lo, hi = 1e-9 * mu_bar, 0.999 * mu_bar
        flo, fhi = f(lo), f(hi)
        if not (np.sign(flo) != np.sign(fhi) and math.isfinite(flo)):
            raise NoBracketError(
                f"no sign change on (0, {hi:.4g}) for mu_bar={mu_bar:.4g}, "
                f"eps={eps:.4g}: spread too large for the small-spread regime"
            )
    lam, res = _bisect_secant(f, lo, hi, flo, fhi, cfg)
    return make_gap_solution(mu_bar, eps, prefs.alpha, lam, residual=res)


@dataclass(frozen=True)
class OrderReport:
    """Log-log fit of the remainder lam(eps) - lam_leading(eps)."""

    eps_grid: tuple
    remainders: tuple
    slope: float


def verify_asymptotic_order(
    mu: float,
    sigma: float,
    eps_grid,
    cfg: SolverConfig = SolverConfig(),
) -> OrderReport:
    """Fit the order of the gap remainder over a decreasing spread grid.

    The remainder lam - (3/4 mu_bar^2)^(1/3) eps^(1/3) is O(eps); the fitted
    slope of log|remainder| against log(eps) should be close to 1.
    """
    eps_grid = sorted(float(e) for e in eps_grid)
    if len(eps_grid) < 2:
        raise ValueError("need at least two spread values to fit an order")
    prefs = Preferences(alpha=1.0)  # the gap is alpha-free
    rems = []
    for eps in eps_grid:
        market = MarketParams(mu=mu, sigma=sigma, epsilon=eps)
        gap = solve_gap(market, prefs, cfg)
        rems.append(abs(gap.lambda_bar - gap_leading_order(market).lambda_leading))
    slope = float(np.polyfit(np.log(eps_grid), np.log(rems), 1)[0])
    return OrderReport(eps_grid=tuple(eps_grid), remainders=tuple(rems), slope=slope)
