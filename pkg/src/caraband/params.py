"""Market and preference parameter types.

All quantities are quoted per calendar year: ``mu`` in 1/year, ``sigma`` in
1/sqrt(year).  The mean-variance ratio ``mu_bar = mu / sigma**2`` is the single
dimensionless market parameter that drives the geometry of the no-trade band.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MarketParams:
    """One risky asset: drift, volatility and relative bid-ask spread."""

    mu: float        # expected excess return, per year
    sigma: float     # volatility, per sqrt(year)
    epsilon: float   # relative bid-ask spread, in (0, 1)

    def __post_init__(self) -> None:
        if not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")

    @property
    def mu_bar(self) -> float:
        """Mean-variance ratio mu / sigma^2 (dimensionless)."""
        return self.mu / self.sigma**2


@dataclass(frozen=True)
class Preferences:
    """Constant absolute risk aversion."""

    alpha: float  # absolute risk aversion, per dollar

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
