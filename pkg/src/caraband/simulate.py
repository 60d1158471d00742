"""Monte Carlo engine for the reflected state variable and wealth accounting.

The state Y is a Brownian motion with drift reflected in [0, log(u/l)],
discretized by an Euler step with a clamp-and-ledger reflection: the deficit
below 0 goes to the buy local time L, the excess above log(u/l) to the sell
local time U.  Trades are valued at execution prices: purchases at the ask
(position l at the buy boundary), sales at the bid (position eta_plus at the
sell boundary).

Under the risk-neutral measure the drift becomes state dependent,
(mu - sigma^2/2) - sigma^2 w(Y), and each path accumulates the log likelihood
ratio back to the physical measure, which doubles as an importance-sampling
weight for the heavy-tailed exponential-utility estimator.

Paths use counter-based Philox streams keyed by (seed, path index), so
results do not depend on execution order or chunking.
"""

from __future__ import annotations

import csv
import enum
import gzip
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from numba import njit

from .closedform import GapSolution
from .gap import OrderReport, SolverConfig, solve_gap
from .params import MarketParams, Preferences
from .shadow import ShadowModel

__all__ = [
    "Measure",
    "SimConfig",
    "PathRecord",
    "Estimate",
    "SimResult",
    "BoundReport",
    "OverflowGuardError",
    "simulate_reflected",
    "account_trades",
    "estimate_equivalent_annuity",
    "verify_finite_horizon_bound",
    "state_samples",
    "dump_paths_csv",
]


class OverflowGuardError(FloatingPointError):
    """exp(-alpha * wealth) would overflow: alpha or horizon mis-scaled."""


class Measure(enum.Enum):
    PHYSICAL = "physical"
    RISK_NEUTRAL = "risk_neutral"


@dataclass(frozen=True)
class SimConfig:
    horizon_years: float
    dt_years: float
    n_paths: int
    seed: int
    measure: Measure = Measure.PHYSICAL
    y0: float = 0.0
    compute_shadow: bool = False   # accumulate the frictionless shadow wealth

    def __post_init__(self) -> None:
        if not self.dt_years > 0:
            raise ValueError("dt_years must be positive")
        if self.horizon_years < self.dt_years:
            raise ValueError("horizon_years must be >= dt_years")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon_years / self.dt_years)))


@dataclass(frozen=True)
class PathRecord:
    y_final: float
    l_total: float            # accumulated reflection at the buy boundary
    u_total: float            # accumulated reflection at the sell boundary
    bought_value: float       # dollars bought at ask
    sold_value: float         # dollars sold at bid
    wealth_terminal: float    # liquidation value, from zero initial cash
    shadow_wealth_terminal: float  # unit-risk-aversion X_tilde_T, X_tilde_0 = 0
                                   # (true shadow wealth is this / alpha; nan if off)
    position_time_avg: float  # time average of the dollar risky position
    log_weight: float         # log dP/dQ for risk-neutral paths, else 0


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float


@dataclass(frozen=True)
class SimResult:
    ea_estimate: Optional[Estimate]
    sht_estimate: Estimate
    wet_estimate: Estimate
    lt_buy_estimate: Estimate
    lt_sell_estimate: Estimate
    avg_position_estimate: Estimate
    fh_primal_lhs: Optional[Estimate] = None
    fh_primal_rhs: Optional[Estimate] = None


@njit(cache=True, inline="always")
def _w_scalar(y, m, b, kappa):
    t = kappa * y * y
    if abs(t) < 1e-8:
        c = 1.0 - t / 2.0 * (1.0 - t / 12.0)
        s = y * (1.0 - t / 6.0 * (1.0 - t / 20.0))
    elif kappa > 0.0:
        a = math.sqrt(kappa)
        c = math.cos(a * y)
        s = math.sin(a * y) / a
    else:
        a = math.sqrt(-kappa)
        c = math.cosh(a * y)
        s = math.sinh(a * y) / a
    return m + (kappa * s + b * c) / (c - b * s)


@njit(cache=True)
def _advance(y, L, U, sum_expy, logw, xtil, z, dt, drift0, sigma, alpha,
             m, b, kappa, ymax, riskneutral, shadow):
    """Advance one path through len(z) Euler steps; returns the new state."""
    sqdt = math.sqrt(dt)
    sig2 = sigma * sigma
    for i in range(z.shape[0]):
        zi = z[i]
        dw = sqdt * zi
        if riskneutral or shadow:
            w = _w_scalar(y, m, b, kappa)
            wp = (w - m) * (w - m) + kappa
            if shadow:
                xtil += (sig2 / alpha) * w * wp * dt + (sigma / alpha) * wp * dw
            if riskneutral:
                y += (drift0 - sig2 * w) * dt + sigma * dw
                logw += sigma * w * dw - 0.5 * sig2 * w * w * dt
            else:
                y += drift0 * dt + sigma * dw
        else:
            y += drift0 * dt + sigma * dw
        if y < 0.0:
            L += -y
            y = 0.0
        elif y > ymax:
            U += y - ymax
            y = ymax
        sum_expy += math.exp(y)
    return y, L, U, sum_expy, logw, xtil


def _path_rng(seed: int, path: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(path)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_paths(gap: GapSolution, market: MarketParams, cfg: SimConfig,
               chunk_steps: int = 1_000_000, record_snapshots: bool = False):
    """Run all paths; returns dict of per-path arrays (and snapshots if asked).

    Snapshots are taken at chunk boundaries, so ``chunk_steps`` doubles as the
    snapshot stride.
    """
    n_steps = cfg.n_steps
    m = gap.mu_bar - 0.5
    b, kappa, ymax = gap.b, gap.kappa, gap.y_max
    drift0 = market.mu - 0.5 * market.sigma**2
    riskneutral = cfg.measure is Measure.RISK_NEUTRAL
    shadow = cfg.compute_shadow and not riskneutral
    # shadow wealth is accumulated for unit risk aversion; since the optimal
    # position scales as 1/alpha, alpha * X_tilde is alpha-free and xtil
    # stores exactly that product.
    alpha_scale = 1.0

    n = cfg.n_paths
    out = {k: np.empty(n) for k in ("y", "L", "U", "pos_sum", "logw", "xtil")}
    n_chunks = -(-n_steps // chunk_steps)
    snaps = np.empty((n, n_chunks, 3)) if record_snapshots else None

    for p in range(n):
        rng = _path_rng(cfg.seed, p)
        y, L, U, sum_expy, logw, xtil = cfg.y0, 0.0, 0.0, 0.0, 0.0, 0.0
        done = 0
        ci = 0
        while done < n_steps:
            k = min(chunk_steps, n_steps - done)
            z = rng.standard_normal(k)
            y, L, U, sum_expy, logw, xtil = _advance(
                y, L, U, sum_expy, logw, xtil, z, cfg.dt_years, drift0,
                market.sigma, alpha_scale, m, b, kappa, ymax, riskneutral, shadow,
            )
            done += k
            if record_snapshots:
                snaps[p, ci] = (y, L, U)
                ci += 1
        out["y"][p] = y
        out["L"][p] = L
        out["U"][p] = U
        out["pos_sum"][p] = sum_expy
        out["logw"][p] = logw
        out["xtil"][p] = xtil
    if record_snapshots:
        out["snapshots"] = snaps
    return out


def simulate_reflected(gap: GapSolution, market: MarketParams, cfg: SimConfig):
    """Simulate reflected paths and account wealth/trades at bid and ask."""
    if not 0.0 <= cfg.y0 <= gap.y_max * (1 + 1e-12):
        raise ValueError(f"y0 must lie in [0, {gap.y_max:.6g}]")
    raw = _run_paths(gap, market, cfg)
    eta_plus = (1.0 - gap.epsilon) * gap.u
    n_steps = cfg.n_steps
    records = []
    for p in range(cfg.n_paths):
        L, U, y = raw["L"][p], raw["U"][p], raw["y"][p]
        bought = gap.l * L
        sold = eta_plus * U
        # zero initial cash: buy the starting position at ask, liquidate at bid
        wealth = -gap.l * math.exp(cfg.y0) - bought + sold + (1.0 - gap.epsilon) * gap.l * math.exp(y)
        records.append(PathRecord(
            y_final=y,
            l_total=L,
            u_total=U,
            bought_value=bought,
            sold_value=sold,
            wealth_terminal=wealth,
            shadow_wealth_terminal=raw["xtil"][p] if cfg.compute_shadow else math.nan,
            position_time_avg=gap.l * raw["pos_sum"][p] / n_steps,
            log_weight=raw["logw"][p] if cfg.measure is Measure.RISK_NEUTRAL else 0.0,
        ))
    return records


def _mean_se(x: np.ndarray) -> Estimate:
    x = np.asarray(x, dtype=float)
    se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else math.inf
    return Estimate(value=float(x.mean()), stderr=se)


def account_trades(paths, gap: GapSolution, market: MarketParams, prefs: Preferences,
                   horizon_years: float) -> SimResult:
    """Ergodic turnover and position estimates with standard errors."""
    del market, prefs  # trade values are already embedded in the records
    T = horizon_years
    L = np.array([r.l_total for r in paths])
    U = np.array([r.u_total for r in paths])
    traded = np.array([r.bought_value + r.sold_value for r in paths])
    pos = np.array([r.position_time_avg for r in paths])
    return SimResult(
        ea_estimate=None,
        sht_estimate=_mean_se((L + U) / T),
        wet_estimate=_mean_se(traded / T),
        lt_buy_estimate=_mean_se(L / T),
        lt_sell_estimate=_mean_se(U / T),
        avg_position_estimate=_mean_se(pos),
    )


def estimate_equivalent_annuity(paths, prefs: Preferences, horizon_years: float) -> Estimate:
    """-(1/(alpha T)) log mean(exp(-alpha Xi_T)), delta-method standard error.

    Risk-neutral paths carry importance-sampling log weights, which tame the
    lognormal tails of the plain physical-measure estimator.
    """
    a, T = prefs.alpha, horizon_years
    x = np.array([-a * r.wealth_terminal + r.log_weight for r in paths])
    if np.max(x) > 700.0:
        raise OverflowGuardError(
            f"exp argument {np.max(x):.1f} exceeds floating range; "
            "check the scaling of alpha and the horizon"
        )
    ex = np.exp(x)
    m = _mean_se(ex)
    return Estimate(value=-math.log(m.value) / (a * T), stderr=m.stderr / (m.value * a * T))


@dataclass(frozen=True)
class BoundReport:
    """Both sides of the finite-horizon wealth identity, with MC errors."""

    lhs: Estimate        # E[exp(-alpha X_tilde_T)], physical measure
    rhs: Estimate        # exp(-alpha sigma^2 beta_bar T) * E_Q[exp(dq_tilde)]
    z_score: float       # log-difference in combined standard errors
    q_abs_max: float     # max |q_tilde| on the state interval
    horizon_years: float


def verify_finite_horizon_bound(
    gap: GapSolution,
    model: ShadowModel,
    market: MarketParams,
    prefs: Preferences,
    cfg: SimConfig,
) -> BoundReport:
    """Cross-check E[e^{-a X~_T}] = e^{-a s^2 beta T} E_Q[e^{q~(Y_T)-q~(Y_0)}].

    The left side simulates the shadow wealth under the physical measure, the
    right side simulates only the state under the risk-neutral measure; the
    identity is exact, so the z-score of the log difference is pure MC noise.
    """
    a = prefs.alpha
    beta_bar = (gap.mu_bar**2 - gap.lambda_bar**2) / (2.0 * a)
    T = cfg.horizon_years

    phys = _run_paths(gap, market, replace(cfg, measure=Measure.PHYSICAL, compute_shadow=True))
    # xtil already carries the alpha factor (unit-risk-aversion accumulation)
    lhs_draws = np.exp(-phys["xtil"])
    lhs = _mean_se(lhs_draws)

    rn = _run_paths(gap, market, replace(cfg, measure=Measure.RISK_NEUTRAL, compute_shadow=False))
    q0 = float(model.q_tilde(cfg.y0))
    rhs_draws = np.exp(np.asarray(model.q_tilde(rn["y"])) - q0)
    factor = math.exp(-a * market.sigma**2 * beta_bar * T)
    rhs = Estimate(value=factor * float(np.mean(rhs_draws)),
                   stderr=factor * _mean_se(rhs_draws).stderr)

    rel = math.sqrt((lhs.stderr / lhs.value) ** 2 + (rhs.stderr / rhs.value) ** 2)
    z = (math.log(lhs.value) - math.log(rhs.value)) / rel
    grid = np.linspace(0.0, gap.y_max, 513)
    q_abs_max = float(np.max(np.abs(model.q_tilde(grid))))
    return BoundReport(lhs=lhs, rhs=rhs, z_score=z, q_abs_max=q_abs_max, horizon_years=T)


def q_correction_order(mu: float, sigma: float, eps_grid,
                       solver: SolverConfig = SolverConfig()) -> OrderReport:
    """Fitted order in eps of the transitory correction magnitude max|q_tilde|.

    The finite-horizon identity differs from the stationary annuity only by
    this bounded term, which vanishes linearly in the spread.
    """
    eps_grid = sorted(float(e) for e in eps_grid)
    if len(eps_grid) < 2:
        raise ValueError("need at least two spread values to fit an order")
    prefs = Preferences(alpha=1.0)  # q_tilde is alpha-free
    mags = []
    for eps in eps_grid:
        market = MarketParams(mu=mu, sigma=sigma, epsilon=eps)
        gap = solve_gap(market, prefs, solver)
        model = ShadowModel(gap=gap, market=market)
        grid = np.linspace(0.0, gap.y_max, 513)
        mags.append(float(np.max(np.abs(model.q_tilde(grid)))))
    slope = float(np.polyfit(np.log(eps_grid), np.log(mags), 1)[0])
    return OrderReport(eps_grid=tuple(eps_grid), remainders=tuple(mags), slope=slope)


def state_samples(gap: GapSolution, market: MarketParams, cfg: SimConfig,
                  stride_steps: int) -> np.ndarray:
    """Subsampled state values across all paths (for stationarity checks)."""
    raw = _run_paths(gap, market, cfg, chunk_steps=stride_steps, record_snapshots=True)
    return raw["snapshots"][:, :, 0].ravel()


def dump_paths_csv(filename: str, gap: GapSolution, market: MarketParams,
                   cfg: SimConfig, stride_steps: int, s0: float = 1.0) -> None:
    """Write subsampled paths as CSV (path_id, t, y, L, U, cash, shares).

    Shares are normalized to an initial ask price ``s0``; cash starts from the
    initial purchase of the position at the ask.  ``.gz`` suffix gzips.
    """
    raw = _run_paths(gap, market, cfg, chunk_steps=stride_steps, record_snapshots=True)
    snaps = raw["snapshots"]
    eta_plus = (1.0 - gap.epsilon) * gap.u
    opener = gzip.open if filename.endswith(".gz") else open
    with opener(filename, "wt", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path_id", "t", "y", "L", "U", "cash", "shares"])
        n_chunks = snaps.shape[1]
        for p in range(cfg.n_paths):
            for ci in range(n_chunks):
                steps = min((ci + 1) * stride_steps, cfg.n_steps)
                t = steps * cfg.dt_years
                y, L, U = snaps[p, ci]
                cash = -gap.l * math.exp(cfg.y0) - gap.l * L + eta_plus * U
                shares = gap.l * math.exp(cfg.y0) / s0 * math.exp(L - U)
                writer.writerow([p, f"{t:.10g}", f"{y:.10g}", f"{L:.10g}",
                                 f"{U:.10g}", f"{cash:.10g}", f"{shares:.10g}"])
