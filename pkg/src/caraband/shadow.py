"""Shadow-price construction.

The shadow price is S_tilde = S * exp(-Y) * g(exp(Y)) for the reflected state
Y in [0, log(u/l)].  Its drift and volatility follow from g and its
derivatives; g'' is never finite-differenced but eliminated through the ODE
g''(e^y) e^y = g'(e^y) (2 w(y) - 2 mu_bar).

The auxiliary w_tilde(y) = w(y) - alpha g'(e^y) e^y l vanishes at both
boundaries, and its antiderivative q_tilde is the transitory component of the
certainty-equivalent decomposition used by the finite-horizon bound check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closedform import (
    GapSolution,
    eval_g,
    eval_int_w,
    eval_k,
    eval_w,
)
from .params import MarketParams

__all__ = ["ShadowModel", "InitialState", "initial_jump"]


@dataclass(frozen=True)
class ShadowModel:
    """Evaluators for the shadow-price coefficients on [0, log(u/l)]."""

    gap: GapSolution
    market: MarketParams

    @property
    def y_max(self) -> float:
        return self.gap.y_max

    def _gprime_ey(self, y):
        """g'(e^y) e^y = 1/k(y)."""
        return 1.0 / eval_k(self.gap, y)

    def sigma_tilde(self, y):
        """Shadow volatility sigma * g'(e^y) e^y / g(e^y), per sqrt(year).

        Equals sigma at both boundaries (smooth pasting)."""
        return self.market.sigma * self._gprime_ey(y) / eval_g(self.gap, y)

    def mu_tilde(self, y):
        """Shadow drift (mu g' e^y + sigma^2/2 g'' e^{2y}) / g, per year."""
        w = eval_w(self.gap, y)
        # g'' e^{2y} = g' e^y * (2w - 2 mu_bar)
        sig2 = self.market.sigma**2
        drift_num = self.market.mu + sig2 * (w - self.gap.mu_bar)
        return self._gprime_ey(y) * drift_num / eval_g(self.gap, y)

    def w_tilde(self, y):
        """w(y) - alpha g'(e^y) e^y l; zero at both boundaries."""
        return eval_w(self.gap, y) - (self.gap.mu_bar - self.gap.lambda_bar) / eval_k(self.gap, y)

    def q_tilde(self, y):
        """Antiderivative of w_tilde with q_tilde(0) = 0 (closed form).

        q_tilde(y) = int_0^y w - alpha l (g(e^y) - 1); the simulator evaluates
        this once per path endpoint, so the quadrature-free form matters.
        """
        al = self.gap.mu_bar - self.gap.lambda_bar  # alpha * l
        return eval_int_w(self.gap, y) - al * (eval_g(self.gap, y) - 1.0)

    def eta_tilde(self, y):
        """Optimal dollar position in the shadow market, g(e^y) * l."""
        return eval_g(self.gap, y) * self.gap.l

    def shadow_price(self, s, y):
        """Shadow price for ask price s: always within [(1-eps) s, s]."""
        y = np.asarray(y, dtype=float)
        return s * np.exp(-y) * eval_g(self.gap, y)


@dataclass(frozen=True)
class InitialState:
    """Post-jump starting point with the cash effect of the initial trade."""

    xi0: float           # initial safe units, dollars
    xi: float            # initial risky units, shares
    s0: float            # initial ask price, dollars/share
    y0: float            # post-jump state coordinate
    shares_traded: float  # signed: > 0 bought at ask, < 0 sold at bid
    cash_after: float    # safe position after the initial lump trade


def initial_jump(xi0: float, xi: float, s0: float, gap: GapSolution) -> InitialState:
    """Move an out-of-band initial position to the nearest band boundary.

    Jumps up to l execute at the ask, jumps down to u at the bid; interior
    positions start without trading.
    """
    if not s0 > 0:
        raise ValueError(f"initial ask price must be positive, got {s0}")
    value = xi * s0
    if value <= gap.l:
        y0 = 0.0
        shares = gap.l / s0 - xi                      # buy at ask
        cash = xi0 - shares * s0
    elif value >= gap.u:
        y0 = gap.y_max
        shares = gap.u / s0 - xi                      # sell at bid
        cash = xi0 - shares * s0 * (1.0 - gap.epsilon)
    else:
        y0 = math.log(value / gap.l)
        shares = 0.0
        cash = xi0
    return InitialState(xi0=xi0, xi=xi, s0=s0, y0=y0, shares_traded=shares, cash_after=cash)
