import pytest

from caraband import MarketParams, Preferences, solve_gap

# headline example: mu_bar = 3.125, trigonometric branch
FIG_MU, FIG_SIGMA, FIG_EPS, FIG_ALPHA = 0.08, 0.16, 0.01, 0.03125


@pytest.fixture(scope="session")
def fig_market():
    return MarketParams(mu=FIG_MU, sigma=FIG_SIGMA, epsilon=FIG_EPS)


@pytest.fixture(scope="session")
def fig_prefs():
    return Preferences(alpha=FIG_ALPHA)


@pytest.fixture(scope="session")
def fig_gap(fig_market, fig_prefs):
    return solve_gap(fig_market, fig_prefs)


@pytest.fixture(scope="session")
def hyp_market():
    # mu_bar = 0.2 < 1/4: hyperbolic branch
    return MarketParams(mu=0.2 * FIG_SIGMA**2, sigma=FIG_SIGMA, epsilon=FIG_EPS)


@pytest.fixture(scope="session")
def hyp_gap(hyp_market, fig_prefs):
    return solve_gap(hyp_market, fig_prefs)
