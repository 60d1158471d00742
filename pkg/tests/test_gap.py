"""Gap root-finding: residuals, golden values, asymptotics, failure modes."""

import math

import numpy as np
import pytest

from caraband.closedform import boundary_residual
from caraband.gap import (
    MaxIterExceededError,
    NoBracketError,
    SolverConfig,
    gap_leading_order,
    solve_gap,
    verify_asymptotic_order,
)
from caraband.params import MarketParams, Preferences

PREFS = Preferences(alpha=0.03125)

# frozen after verification against the Riccati oracle (rtol ~ 1e-11)
GOLDEN_GAPS = {
    (3.125, 0.01): 0.41146437057856045,
    (0.2, 0.01): 0.06519470195704578,
}


@pytest.mark.parametrize("mu_bar", [0.2, 0.5, 1.0, 3.125])
@pytest.mark.parametrize("eps", [1e-4, 1e-3, 1e-2])
def test_residual_grid(mu_bar, eps):
    market = MarketParams(mu=mu_bar * 0.16**2, sigma=0.16, epsilon=eps)
    gap = solve_gap(market, PREFS)
    assert abs(boundary_residual(mu_bar, eps, gap.lambda_bar)) <= 1e-9


@pytest.mark.parametrize(("mu_bar", "eps"), sorted(GOLDEN_GAPS))
def test_golden_values(mu_bar, eps):
    market = MarketParams(mu=mu_bar * 0.16**2, sigma=0.16, epsilon=eps)
    gap = solve_gap(market, PREFS)
    assert abs(gap.lambda_bar - GOLDEN_GAPS[(mu_bar, eps)]) < 1e-9


def test_leading_order_value():
    market = MarketParams(mu=0.08, sigma=0.16, epsilon=0.01)
    lead = gap_leading_order(market).lambda_leading
    assert abs(lead - 0.418395593801356) < 1e-12


def test_gap_is_alpha_free():
    market = MarketParams(mu=0.08, sigma=0.16, epsilon=0.01)
    g1 = solve_gap(market, Preferences(alpha=0.03125))
    g2 = solve_gap(market, Preferences(alpha=7.0))
    assert g1.lambda_bar == g2.lambda_bar
    assert abs(g1.l * 0.03125 - g2.l * 7.0) < 1e-12


def test_gap_depends_only_on_mu_bar_and_eps():
    # same mu_bar = 3.125 through different (mu, sigma)
    g1 = solve_gap(MarketParams(mu=0.08, sigma=0.16, epsilon=0.01), PREFS)
    g2 = solve_gap(MarketParams(mu=0.02, sigma=0.08, epsilon=0.01), PREFS)
    assert abs(g1.lambda_bar - g2.lambda_bar) < 1e-12


def test_gap_increases_with_spread():
    lams = []
    for eps in (1e-5, 1e-4, 1e-3, 1e-2, 1e-1):
        market = MarketParams(mu=0.08, sigma=0.16, epsilon=eps)
        lams.append(solve_gap(market, PREFS).lambda_bar)
    assert np.all(np.diff(lams) > 0)


def test_tiny_spread():
    market = MarketParams(mu=0.08, sigma=0.16, epsilon=1e-8)
    gap = solve_gap(market, PREFS)
    lead = gap_leading_order(market).lambda_leading
    assert abs(gap.lambda_bar / lead - 1.0) < 1e-2


def test_large_spread_stall_regression():
    # steep residual with a pole inside the bracket used to stall the secant
    market = MarketParams(mu=0.08, sigma=0.16, epsilon=0.4743273672889498)
    gap = solve_gap(market, PREFS)
    assert abs(gap.residual) <= 1e-11


def test_no_bracket_error():
    market = MarketParams(mu=0.2 * 0.16**2, sigma=0.16, epsilon=0.995)
    with pytest.raises(NoBracketError):
        solve_gap(market, PREFS)


def test_max_iter_error():
    market = MarketParams(mu=0.08, sigma=0.16, epsilon=0.01)
    with pytest.raises(MaxIterExceededError):
        solve_gap(market, PREFS, SolverConfig(tol_residual=1e-15, max_iter=3))


def test_root_is_unique_on_bracket():
    # sign changes exactly once on a fine lambda sweep
    mu_bar, eps = 3.125, 0.01
    lams = np.linspace(1e-3, 0.999 * mu_bar, 4000)
    res = np.array([boundary_residual(mu_bar, eps, lam) for lam in lams])
    finite = np.isfinite(res)
    flips = np.sum(np.diff(np.sign(res[finite])) != 0)
    assert flips == 1


def test_asymptotic_order_fit():
    rep = verify_asymptotic_order(0.08, 0.16, [1e-4, 3e-4, 1e-3, 3e-3, 1e-2])
    assert rep.slope >= 0.9
    assert all(r > 0 for r in rep.remainders)
    with pytest.raises(ValueError):
        verify_asymptotic_order(0.08, 0.16, [1e-3])


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol_residual=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)
    with pytest.raises(ValueError):
        SolverConfig(bracket_shrink=1.5)


def test_market_params_validation():
    with pytest.raises(ValueError):
        MarketParams(mu=0.08, sigma=0.16, epsilon=0.0)
    with pytest.raises(ValueError):
        MarketParams(mu=0.08, sigma=0.16, epsilon=1.0)
    with pytest.raises(ValueError):
        MarketParams(mu=0.08, sigma=0.0, epsilon=0.01)
    with pytest.raises(ValueError):
        MarketParams(mu=-0.08, sigma=0.16, epsilon=0.01)
    with pytest.raises(ValueError):
        Preferences(alpha=0.0)
    assert math.isclose(MarketParams(mu=0.08, sigma=0.16, epsilon=0.01).mu_bar, 3.125)
