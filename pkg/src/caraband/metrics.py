"""Closed-form welfare, policy, and trading-volume statistics.

Every quantity here is a pure function of a solved GapSolution plus the market
and preference parameters.  Rates are per calendar year; the CLI offers a
business-time rescaling (clock tau = sigma^2 t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .closedform import GapSolution
from .params import MarketParams, Preferences

__all__ = [
    "PolicyMetrics",
    "equivalent_annuity",
    "liquidity_premium",
    "trading_boundaries",
    "local_time_averages",
    "relative_turnover",
    "absolute_turnover",
    "average_position",
    "implied_risk_aversion_estimate",
    "policy_metrics",
]

# |x * log(u/l)| below this: series for x / (exp(x log r) - 1)
_SINGULAR_TOL = 1e-5


def _rate_coeff(x: float, log_r: float) -> float:
    """x / (r^x - 1) for r = u/l, with the removable singularity at x = 0.

    Near x = 0 the closed form cancels catastrophically; a three-term
    expansion in x*log(r) keeps the evaluation continuous through mu_bar = 1/2.
    """
    t = x * log_r
    if abs(t) < _SINGULAR_TOL:
        return (1.0 - t / 2.0 + t * t / 12.0) / log_r
    return x / math.expm1(t)


@dataclass(frozen=True)
class PolicyMetrics:
    """Welfare/volume bundle for one asset (all per calendar year)."""

    ea: float            # equivalent annuity, dollars/year
    lip: float           # liquidity premium, 1/year
    eta_minus: float     # buy boundary, dollars (ask valuation)
    eta_plus: float      # sell boundary, dollars (bid valuation)
    sht: float           # relative turnover, 1/year
    wet: float           # absolute turnover, dollars/year
    wet_minus: float     # expected purchases, dollars/year
    wet_plus: float      # expected sales, dollars/year
    lt_buy: float        # long-run lim L_T / T, 1/year
    lt_sell: float       # long-run lim U_T / T, 1/year
    avg_position: float  # long-run average risky position, dollars
    alpha_hat: float     # risk aversion implied by the average position


def equivalent_annuity(gap: GapSolution, market: MarketParams, prefs: Preferences) -> float:
    """sigma^2 (mu_bar^2 - lam^2) / (2 alpha), dollars per year."""
    return market.sigma**2 * (gap.mu_bar**2 - gap.lambda_bar**2) / (2.0 * prefs.alpha)


def liquidity_premium(gap: GapSolution, market: MarketParams) -> float:
    """Drop in excess return of an equivalent frictionless asset, 1/year."""
    mb, lam = gap.mu_bar, gap.lambda_bar
    return market.sigma**2 * (mb - math.sqrt(mb**2 - lam**2))


def trading_boundaries(gap: GapSolution, prefs: Preferences):
    """(eta_minus, eta_plus) = (mu_bar -+ lam) / alpha in dollars.

    eta_minus is an ask-price valuation and eta_plus a bid-price valuation;
    the band endpoints satisfy l = eta_minus and u = eta_plus / (1 - eps).
    """
    eta_minus = (gap.mu_bar - gap.lambda_bar) / prefs.alpha
    eta_plus = (gap.mu_bar + gap.lambda_bar) / prefs.alpha
    return eta_minus, eta_plus


def local_time_averages(gap: GapSolution, market: MarketParams):
    """(lim L_T/T, lim U_T/T): reflection rates at the buy/sell boundaries."""
    x = 2.0 * gap.mu_bar - 1.0
    half_var = 0.5 * market.sigma**2
    lt_buy = half_var * _rate_coeff(x, gap.y_max)
    lt_sell = half_var * _rate_coeff(-x, gap.y_max)
    return lt_buy, lt_sell


def relative_turnover(gap: GapSolution, market: MarketParams) -> float:
    """Shares traded per share held, per year (alpha-free)."""
    lt_buy, lt_sell = local_time_averages(gap, market)
    return lt_buy + lt_sell


def absolute_turnover(gap: GapSolution, market: MarketParams, prefs: Preferences):
    """(wet, wet_minus, wet_plus): dollars traded per year at execution prices.

    Purchases happen at the buy boundary (position eta_minus at the ask),
    sales at the sell boundary (position eta_plus at the bid), so the split is
    wet_minus = eta_minus * lim L_T/T and wet_plus = eta_plus * lim U_T/T.
    """
    eta_minus, eta_plus = trading_boundaries(gap, prefs)
    lt_buy, lt_sell = local_time_averages(gap, market)
    wet_minus = eta_minus * lt_buy
    wet_plus = eta_plus * lt_sell
    return wet_minus + wet_plus, wet_minus, wet_plus


def average_position(gap: GapSolution, market: MarketParams, prefs: Preferences) -> float:
    """Long-run time average of the risky position under the stationary law.

    The stationary density of the reflected state is proportional to
    exp((2 mu_bar - 1) y) on [0, log(u/l)].
    """
    # band ratio u/l is alpha- and variance-free; l carries the dollar units
    mb = gap.mu_bar
    r = gap.u / gap.l
    return gap.l * _rate_coeff(2.0 * mb - 1.0, gap.y_max) * (r**(2.0 * mb) - 1.0) / (2.0 * mb)


def implied_risk_aversion_estimate(
    gap: GapSolution, market: MarketParams, prefs: Preferences
) -> float:
    """alpha implied by matching the average position to the frictionless rule.

    Underestimates the true alpha for mu_bar > 1 and overestimates it for
    mu_bar < 1 (the stationary law is skewed toward the sell boundary).
    """
    return gap.mu_bar / average_position(gap, market, prefs)


def policy_metrics(gap: GapSolution, market: MarketParams, prefs: Preferences) -> PolicyMetrics:
    eta_minus, eta_plus = trading_boundaries(gap, prefs)
    lt_buy, lt_sell = local_time_averages(gap, market)
    wet, wet_minus, wet_plus = absolute_turnover(gap, market, prefs)
    avg_pos = average_position(gap, market, prefs)
    return PolicyMetrics(
        ea=equivalent_annuity(gap, market, prefs),
        lip=liquidity_premium(gap, market),
        eta_minus=eta_minus,
        eta_plus=eta_plus,
        sht=lt_buy + lt_sell,
        wet=wet,
        wet_minus=wet_minus,
        wet_plus=wet_plus,
        lt_buy=lt_buy,
        lt_sell=lt_sell,
        avg_position=avg_pos,
        alpha_hat=gap.mu_bar / avg_pos,
    )
