"""Closed-form evaluators against independent ODE/quadrature oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from caraband.closedform import (
    Branch,
    DomainError,
    boundary_residual,
    eval_g,
    eval_int_w,
    eval_k,
    eval_w,
    eval_w_prime,
    make_gap_solution,
)


def _rk_oracle(gap, y_grid):
    """Integrate the defining Riccati problem numerically, no closed form."""
    mb, lam = gap.mu_bar, gap.lambda_bar

    def rhs(_, w):
        return w * w - (2.0 * mb - 1.0) * w + (mb * mb - lam * lam)

    sol = solve_ivp(rhs, (0.0, gap.y_max), [mb - lam], t_eval=y_grid,
                    rtol=1e-12, atol=1e-14, method="DOP853")
    assert sol.success
    return sol.y[0]


@pytest.mark.parametrize("gap_fixture", ["fig_gap", "hyp_gap"])
def test_w_matches_rk_oracle(gap_fixture, request):
    gap = request.getfixturevalue(gap_fixture)
    y = np.linspace(0.0, gap.y_max, 200)
    np.testing.assert_allclose(eval_w(gap, y), _rk_oracle(gap, y), rtol=0, atol=1e-8)


@pytest.mark.parametrize("gap_fixture", ["fig_gap", "hyp_gap"])
def test_int_w_matches_quadrature(gap_fixture, request):
    gap = request.getfixturevalue(gap_fixture)
    for y in np.linspace(0.0, gap.y_max, 9):
        val, err = quad(lambda t: float(eval_w(gap, t)), 0.0, y, epsabs=1e-12)
        assert abs(float(eval_int_w(gap, y)) - val) < 1e-9 + 10 * err


@pytest.mark.parametrize("gap_fixture", ["fig_gap", "hyp_gap"])
def test_ode_residual_finite_difference(gap_fixture, request):
    # non-tautological: numerical derivative of w vs the quadratic RHS
    gap = request.getfixturevalue(gap_fixture)
    mb, lam = gap.mu_bar, gap.lambda_bar
    h = 1e-6 * gap.y_max
    y = np.linspace(h, gap.y_max - h, 200)
    dw = (eval_w(gap, y + h) - eval_w(gap, y - h)) / (2 * h)
    w = eval_w(gap, y)
    rhs = w * w - (2 * mb - 1) * w + (mb * mb - lam * lam)
    np.testing.assert_allclose(dw, rhs, rtol=0, atol=1e-6)
    np.testing.assert_allclose(eval_w_prime(gap, y), rhs, rtol=0, atol=1e-12)


@pytest.mark.parametrize("gap_fixture", ["fig_gap", "hyp_gap"])
def test_boundary_values_and_smooth_pasting(gap_fixture, request):
    gap = request.getfixturevalue(gap_fixture)
    mb, lam = gap.mu_bar, gap.lambda_bar
    assert abs(float(eval_w(gap, 0.0)) - (mb - lam)) < 1e-12
    assert abs(float(eval_w(gap, gap.y_max)) - (mb + lam)) < 1e-9
    # first-order pasting: w'(0) = mu_bar - lam follows from b = 1/2 - lam
    assert abs(float(eval_w_prime(gap, 0.0)) - (mb - lam)) < 1e-12
    assert abs(float(eval_k(gap, 0.0)) - 1.0) < 1e-12
    assert abs(float(eval_k(gap, gap.y_max)) - (mb - lam) / (mb + lam)) < 1e-9
    assert abs(float(eval_g(gap, 0.0)) - 1.0) < 1e-12
    assert abs(float(eval_g(gap, gap.y_max)) - (1 - gap.epsilon) * gap.u / gap.l) < 1e-9


@pytest.mark.parametrize("gap_fixture", ["fig_gap", "hyp_gap"])
def test_monotonicity(gap_fixture, request):
    gap = request.getfixturevalue(gap_fixture)
    y = np.linspace(0.0, gap.y_max, 400)
    w = eval_w(gap, y)
    assert np.all(np.diff(w) > 0)           # w increasing
    assert np.all(eval_w_prime(gap, y) > 0)
    k = eval_k(gap, y)
    assert np.all(np.diff(k) < 0)           # k strictly decreasing
    assert np.all(k > 0)


def test_branch_metadata(fig_gap, hyp_gap):
    assert fig_gap.branch is Branch.TRIGONOMETRIC and fig_gap.kappa > 0
    assert hyp_gap.branch is Branch.HYPERBOLIC and hyp_gap.kappa < 0
    for gap in (fig_gap, hyp_gap):
        assert abs(gap.a - math.sqrt(abs(gap.kappa))) < 1e-15
        assert abs(gap.b - (0.5 - gap.lambda_bar)) < 1e-15


def test_series_branch_continuity():
    # kappa ~ 0: series evaluation must join the direct formulas smoothly
    lam = 0.1
    vals = []
    for dk in (-1e-7, -1e-12, 0.0, 1e-12, 1e-7):
        mu_bar = 0.25 + lam**2 + dk
        gap = make_gap_solution(mu_bar, 1e-2, 1.0, lam)
        vals.append(float(eval_w(gap, 0.8 * gap.y_max)))
    diffs = np.abs(np.diff(vals))
    assert np.all(diffs < 1e-6)
    # and the near-zero-kappa solution still satisfies its own ODE
    mu_bar = 0.25 + lam**2 + 1e-12
    gap = make_gap_solution(mu_bar, 1e-2, 1.0, lam)
    y = np.linspace(0.0, gap.y_max, 200)
    np.testing.assert_allclose(eval_w(gap, y), _rk_oracle(gap, y), rtol=0, atol=1e-8)


def test_domain_validation(fig_gap):
    with pytest.raises(DomainError):
        eval_w(fig_gap, -1e-3)
    with pytest.raises(DomainError):
        eval_w(fig_gap, fig_gap.y_max * 1.01)
    # round-off beyond the boundary is clamped, not rejected
    tiny = 1e-15 * fig_gap.y_max
    assert float(eval_w(fig_gap, -tiny)) == float(eval_w(fig_gap, 0.0))


def test_make_gap_solution_validation():
    with pytest.raises(ValueError):
        make_gap_solution(0.5, 1e-2, 1.0, 0.6)   # lam >= mu_bar
    with pytest.raises(ValueError):
        make_gap_solution(0.5, 1e-2, 1.0, 0.0)


def test_boundary_residual_pole_is_positive_inf():
    # candidate with a tan pole before the terminal point
    assert boundary_residual(3.125, 0.4743273672889498, 0.6698) == math.inf
    with pytest.raises(ValueError):
        boundary_residual(0.5, 1e-2, 0.7)


def test_band_endpoints(fig_gap):
    mb, lam, eps = fig_gap.mu_bar, fig_gap.lambda_bar, fig_gap.epsilon
    alpha = (mb - lam) / fig_gap.l
    assert abs(fig_gap.u - (mb + lam) / ((1 - eps) * alpha)) < 1e-9
    assert abs(fig_gap.y_max - math.log(fig_gap.u / fig_gap.l)) < 1e-15
