"""Welfare/volume formulas: scaling laws, limits, and quadrature oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from caraband.gap import solve_gap
from caraband.metrics import (
    average_position,
    equivalent_annuity,
    liquidity_premium,
    local_time_averages,
    policy_metrics,
    trading_boundaries,
)
from caraband.params import MarketParams, Preferences


def _metrics(mu, sigma, eps, alpha):
    market = MarketParams(mu=mu, sigma=sigma, epsilon=eps)
    prefs = Preferences(alpha=alpha)
    gap = solve_gap(market, prefs)
    return gap, policy_metrics(gap, market, prefs)


def test_alpha_scaling_laws():
    # dollar quantities scale as 1/alpha; rates and ratios are alpha-free
    _, pm1 = _metrics(0.08, 0.16, 0.01, 0.03125)
    _, pm2 = _metrics(0.08, 0.16, 0.01, 0.3125)
    for name in ("ea", "wet", "wet_minus", "wet_plus", "eta_minus", "eta_plus",
                 "avg_position"):
        v1, v2 = getattr(pm1, name), getattr(pm2, name)
        assert abs(v1 / v2 - 10.0) < 1e-10
    for name in ("lip", "sht", "lt_buy", "lt_sell"):
        assert abs(getattr(pm1, name) - getattr(pm2, name)) < 1e-10
    assert abs(pm2.alpha_hat / pm1.alpha_hat - 10.0) < 1e-10


def test_variance_scaling_laws():
    # fixed mu_bar: rates scale with sigma^2, dollar positions are unchanged
    c = 4.0
    g1, pm1 = _metrics(0.08, 0.16, 0.01, 0.03125)
    g2, pm2 = _metrics(0.08 * c, 0.16 * math.sqrt(c), 0.01, 0.03125)
    assert abs(g1.lambda_bar - g2.lambda_bar) < 1e-12
    for name in ("ea", "lip", "sht", "wet", "lt_buy", "lt_sell"):
        assert abs(getattr(pm2, name) / getattr(pm1, name) - c) < 1e-10
    for name in ("eta_minus", "eta_plus", "avg_position"):
        assert abs(getattr(pm2, name) - getattr(pm1, name)) < 1e-10


def test_half_mean_variance_ratio_continuity():
    # the turnover rate formula has a removable singularity at mu_bar = 1/2:
    # compare the value there with the average of symmetric neighbors
    h = 1e-4
    sigma, eps, alpha = 0.16, 1e-2, 0.03125
    for name in ("lambda_bar_", "sht", "lt_buy", "lt_sell", "avg_position"):
        vals = []
        for mu_bar in (0.5 - h, 0.5, 0.5 + h):
            gap, pm = _metrics(mu_bar * sigma**2, sigma, eps, alpha)
            vals.append(gap.lambda_bar if name == "lambda_bar_" else getattr(pm, name))
        midpoint_gap = abs(vals[1] - 0.5 * (vals[0] + vals[2]))
        assert midpoint_gap < 1e-6, (name, midpoint_gap)


def test_universal_relation_near_three_quarters():
    for mu_bar in (0.5, 1.0, 3.125):
        _, pm = _metrics(mu_bar * 0.04, 0.2, 1e-3, 1.0)
        ratio = pm.lip / (1e-3 * pm.sht)
        assert 0.675 <= ratio <= 0.825


def test_average_position_quadrature_oracle():
    # stationary density of the reflected state: rho(y) ~ exp((2 mu_bar - 1) y)
    for mu_bar in (0.2, 3.125):
        market = MarketParams(mu=mu_bar * 0.16**2, sigma=0.16, epsilon=0.01)
        prefs = Preferences(alpha=0.03125)
        gap = solve_gap(market, prefs)
        x = 2.0 * mu_bar - 1.0
        norm, _ = quad(lambda y: math.exp(x * y), 0.0, gap.y_max)
        want, _ = quad(lambda y: gap.l * math.exp(y) * math.exp(x * y) / norm,
                       0.0, gap.y_max)
        got = average_position(gap, market, prefs)
        assert abs(got - want) < 1e-10 * abs(want)


def test_headline_values(fig_market, fig_prefs, fig_gap):
    pm = policy_metrics(fig_gap, fig_market, fig_prefs)
    # frictionless benchmarks: position 100 dollars, annuity 4 dollars/year
    assert abs(fig_market.mu_bar / fig_prefs.alpha - 100.0) < 1e-12
    frictionless_ea = fig_market.sigma**2 * fig_market.mu_bar**2 / (2 * fig_prefs.alpha)
    assert abs(frictionless_ea - 4.0) < 1e-12
    assert pm.ea < frictionless_ea
    assert abs(pm.eta_minus - 86.83314014138853) < 1e-6
    assert abs(pm.eta_plus - 113.16685985861147) < 1e-6
    assert abs(pm.ea - 3.9306535205854747) < 1e-9
    # average position exceeds 100: the stationary law leans on the sell side
    assert pm.avg_position > 100.0
    assert pm.alpha_hat < fig_prefs.alpha


def test_boundary_identities(fig_gap, fig_prefs):
    eta_minus, eta_plus = trading_boundaries(fig_gap, fig_prefs)
    assert abs(eta_minus - fig_gap.l) < 1e-12
    assert abs(eta_plus - (1 - fig_gap.epsilon) * fig_gap.u) < 1e-12


def test_local_time_split(fig_market, fig_prefs, fig_gap):
    pm = policy_metrics(fig_gap, fig_market, fig_prefs)
    assert abs(pm.sht - (pm.lt_buy + pm.lt_sell)) < 1e-15
    assert abs(pm.wet - (pm.wet_minus + pm.wet_plus)) < 1e-12
    assert abs(pm.wet_minus - pm.eta_minus * pm.lt_buy) < 1e-12
    assert abs(pm.wet_plus - pm.eta_plus * pm.lt_sell) < 1e-12
    # steady realization of gains: sales dominate purchases for mu_bar > 1/2
    assert pm.wet_plus > pm.wet_minus


def test_small_spread_expansions():
    mu, sigma, alpha = 0.08, 0.16, 0.03125
    market = MarketParams(mu=mu, sigma=sigma, epsilon=1e-3)
    prefs = Preferences(alpha=alpha)
    gap = solve_gap(market, prefs)
    pm = policy_metrics(gap, market, prefs)
    mb = market.mu_bar
    c = (0.75 * mb**2) ** (1.0 / 3.0)
    sht_lead = 0.5 * sigma**2 * mb / c * 1e-3 ** (-1.0 / 3.0)
    wet_lead = 2 * sigma**2 / (3 * alpha) * c**2 * 1e-3 ** (-1.0 / 3.0)
    lip_lead = sigma**2 / (2 * mb) * c**2 * 1e-3 ** (2.0 / 3.0)
    assert abs(pm.sht - sht_lead) / pm.sht < 0.15
    assert abs(pm.wet - wet_lead) / pm.wet < 0.15
    assert abs(pm.lip - lip_lead) / pm.lip < 0.15


def test_ea_remainder_order():
    mu, sigma, alpha = 0.08, 0.16, 0.03125
    prefs = Preferences(alpha=alpha)
    grid = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
    rems = []
    for eps in grid:
        market = MarketParams(mu=mu, sigma=sigma, epsilon=eps)
        gap = solve_gap(market, prefs)
        mb = market.mu_bar
        second = sigma**2 / (2 * alpha) * (mb**2 - (0.75 * mb**2) ** (2 / 3) * eps ** (2 / 3))
        rems.append(abs(equivalent_annuity(gap, market, prefs) - second))
    slope = float(np.polyfit(np.log(grid), np.log(rems), 1)[0])
    assert slope >= 1.2


def test_liquidity_premium_positive_and_small(fig_market, fig_gap):
    lip = liquidity_premium(fig_gap, fig_market)
    assert 0.0 < lip < fig_market.mu


def test_rate_coeff_series_continuity():
    # lt rates through the series threshold in x * log(u/l)
    sigma, eps, alpha = 0.16, 1e-2, 1.0
    prev = None
    for mu_bar in np.linspace(0.49999, 0.50001, 11):
        market = MarketParams(mu=mu_bar * sigma**2, sigma=sigma, epsilon=eps)
        gap = solve_gap(market, Preferences(alpha=alpha))
        lt_buy, lt_sell = local_time_averages(gap, market)
        if prev is not None:
            assert abs(lt_buy - prev[0]) < 1e-7
            assert abs(lt_sell - prev[1]) < 1e-7
        prev = (lt_buy, lt_sell)
