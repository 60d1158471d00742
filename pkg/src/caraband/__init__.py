"""Long-run optimal trading under proportional transaction costs.

Closed-form no-trade band solver for exponential utility, welfare and
turnover statistics, shadow-price construction, Monte Carlo cross-validation,
dealer spread optimization, and independent multi-asset aggregation.
"""

from .closedform import (
    Branch,
    BranchDegenerateError,
    DomainError,
    GapSolution,
    boundary_residual,
    eval_g,
    eval_int_w,
    eval_k,
    eval_w,
    eval_w_prime,
    make_gap_solution,
)
from .gap import (
    GapAsymptotics,
    MaxIterExceededError,
    NoBracketError,
    OrderReport,
    SolverConfig,
    gap_leading_order,
    solve_gap,
    verify_asymptotic_order,
)
from .metrics import PolicyMetrics, policy_metrics
from .multi import MultiAssetError, MultiMarket, MultiResult, solve_all
from .params import MarketParams, Preferences
from .shadow import InitialState, ShadowModel, initial_jump
from .simulate import (
    BoundReport,
    Estimate,
    Measure,
    OverflowGuardError,
    PathRecord,
    SimConfig,
    SimResult,
    account_trades,
    estimate_equivalent_annuity,
    simulate_reflected,
    verify_finite_horizon_bound,
)
from .spread import (
    BookConvention,
    NotUnimodalWarning,
    SpreadCurve,
    SpreadSearch,
    optimize_spread,
    profit,
)

__version__ = "1.0.0"

__all__ = [
    "Branch",
    "BranchDegenerateError",
    "DomainError",
    "GapSolution",
    "boundary_residual",
    "eval_g",
    "eval_int_w",
    "eval_k",
    "eval_w",
    "eval_w_prime",
    "make_gap_solution",
    "GapAsymptotics",
    "MaxIterExceededError",
    "NoBracketError",
    "OrderReport",
    "SolverConfig",
    "gap_leading_order",
    "solve_gap",
    "verify_asymptotic_order",
    "PolicyMetrics",
    "policy_metrics",
    "MultiAssetError",
    "MultiMarket",
    "MultiResult",
    "solve_all",
    "MarketParams",
    "Preferences",
    "InitialState",
    "ShadowModel",
    "initial_jump",
    "BoundReport",
    "Estimate",
    "Measure",
    "OverflowGuardError",
    "PathRecord",
    "SimConfig",
    "SimResult",
    "account_trades",
    "estimate_equivalent_annuity",
    "simulate_reflected",
    "verify_finite_horizon_bound",
    "BookConvention",
    "NotUnimodalWarning",
    "SpreadCurve",
    "SpreadSearch",
    "optimize_spread",
    "profit",
    "__version__",
]
