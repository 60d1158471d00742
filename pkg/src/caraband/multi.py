"""Aggregation across independent risky assets.

With uncorrelated assets the no-trade band of each asset is the one obtained
in isolation, and the welfare and volume statistics add componentwise.  No
correlation parameter is accepted: additivity fails outside independence, so
the module refuses such inputs rather than approximating.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .closedform import GapSolution
from .gap import SolverConfig, solve_gap
from .metrics import PolicyMetrics, policy_metrics
from .params import MarketParams, Preferences

__all__ = [
    "MultiMarket",
    "AssetResult",
    "MultiResult",
    "MultiAssetError",
    "solve_all",
    "load_multi_json",
    "write_multi_csv",
]


class MultiAssetError(RuntimeError):
    """One or more per-asset solves failed; aggregation aborted."""


@dataclass(frozen=True)
class MultiMarket:
    """Ordered collection of independent assets with shared preferences."""

    assets: tuple  # MarketParams, one per asset
    prefs: Preferences

    def __post_init__(self) -> None:
        if not self.assets:
            raise ValueError("need at least one asset")
        if not all(isinstance(a, MarketParams) for a in self.assets):
            raise TypeError("assets must be MarketParams instances")


@dataclass(frozen=True)
class AssetResult:
    index: int
    market: MarketParams
    gap: GapSolution
    metrics: PolicyMetrics


@dataclass(frozen=True)
class MultiResult:
    per_asset: tuple   # AssetResult, input order
    total_ea: float    # dollars/year
    total_wet: float   # dollars/year
    total_sht: float   # 1/year (sum of per-asset share-turnover rates)


def solve_all(multi: MultiMarket, cfg: SolverConfig = SolverConfig()) -> MultiResult:
    """Per-asset band solutions plus additive totals.

    Any per-asset failure aborts the aggregation and reports every failing
    asset, not just the first.
    """
    results = []
    failures = []
    for i, market in enumerate(multi.assets):
        try:
            gap = solve_gap(market, multi.prefs, cfg)
            results.append(AssetResult(index=i, market=market, gap=gap,
                                       metrics=policy_metrics(gap, market, multi.prefs)))
        except Exception as exc:  # noqa: BLE001 - collected and re-raised below
            failures.append(f"asset {i} (mu={market.mu:g}, sigma={market.sigma:g}, "
                            f"eps={market.epsilon:g}): {exc}")
    if failures:
        raise MultiAssetError("; ".join(failures))
    return MultiResult(
        per_asset=tuple(results),
        total_ea=sum(r.metrics.ea for r in results),
        total_wet=sum(r.metrics.wet for r in results),
        total_sht=sum(r.metrics.sht for r in results),
    )


def load_multi_json(filename: str) -> MultiMarket:
    """Input schema: {"alpha": float, "assets": [{"mu", "sigma", "epsilon"}]}."""
    with open(filename) as fh:
        data = json.load(fh)
    assets = tuple(MarketParams(mu=a["mu"], sigma=a["sigma"], epsilon=a["epsilon"])
                   for a in data["assets"])
    return MultiMarket(assets=assets, prefs=Preferences(alpha=data["alpha"]))


def write_multi_csv(filename: str, result: MultiResult) -> None:
    """Per-asset rows plus a TOTAL row (turnover/welfare columns only)."""
    with open(filename, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asset", "mu", "sigma", "epsilon", "lambda_bar",
                         "l", "u", "ea", "lip", "sht", "wet"])
        for r in result.per_asset:
            m, g, pm = r.market, r.gap, r.metrics
            writer.writerow([r.index, repr(m.mu), repr(m.sigma), repr(m.epsilon),
                             repr(g.lambda_bar), repr(g.l), repr(g.u),
                             repr(pm.ea), repr(pm.lip), repr(pm.sht), repr(pm.wet)])
        writer.writerow(["TOTAL", "", "", "", "", "", "",
                         repr(result.total_ea), "", repr(result.total_sht),
                         repr(result.total_wet)])
