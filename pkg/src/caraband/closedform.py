"""Closed-form building blocks of the no-trade band solution.

For a candidate gap ``lam`` in (0, mu_bar) the Riccati initial value problem

    w'(y) = w(y)^2 - (2*mu_bar - 1)*w(y) + (mu_bar^2 - lam^2),   w(0) = mu_bar - lam,

has an explicit solution on the band-width interval [0, log(u/l)].  Writing
``m = mu_bar - 1/2`` the quadratic on the right-hand side is
``(w - m)^2 + kappa`` with discriminant parameter

    kappa = mu_bar - 1/4 - lam^2,

so the solution is a shifted tangent for kappa > 0 and a shifted hyperbolic
cotangent for kappa < 0.  Both branches are the same entire function of kappa,

    w(y) = m + (kappa*S + b*C) / (C - b*S),
    C(y) = cos(sqrt(kappa)*y),   S(y) = sin(sqrt(kappa)*y)/sqrt(kappa),

with b = 1/2 - lam, so the evaluators below use this single representation and
stay finite through the branch change kappa = 0 (where C = 1, S = y).

Note: b = 1/2 - lam is forced by the initial condition w(0) = mu_bar - lam
together with the boundary values w'(0) = mu_bar - lam and
k(log(u/l)) = (mu_bar - lam)/(mu_bar + lam); all three are asserted in tests.

The auxiliary functions are recovered from w:

    k(y) = (mu_bar - lam) / w'(y)            (k = 1/(g'(e^y) e^y))
    g(e^y) = w(y) / (mu_bar - lam)
    int_w(y) = m*y - log(C - b*S)            (antiderivative of w, zero at 0)

These identities follow from k' = k*(2*mu_bar - 1 - 2*w), k(0) = 1 and
g(e^y) = 1 + integral of 1/k; they are cross-checked against independent ODE
and quadrature oracles in the test suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Branch",
    "GapSolution",
    "DomainError",
    "BranchDegenerateError",
    "make_gap_solution",
    "boundary_residual",
    "eval_w",
    "eval_w_prime",
    "eval_k",
    "eval_g",
    "eval_int_w",
]

# |kappa| * y^2 below this: use the Taylor series of C and S around kappa = 0.
_SERIES_THRESHOLD = 1e-8


class DomainError(ValueError):
    """State coordinate outside [0, log(u/l)] beyond clamping tolerance."""


class BranchDegenerateError(ValueError):
    """Raised when a branch-specific formula is requested at |a| ~ 0."""


class Branch(enum.Enum):
    HYPERBOLIC = "hyperbolic"      # kappa < 0: coth branch
    TRIGONOMETRIC = "trigonometric"  # kappa >= 0: tan branch


@dataclass(frozen=True)
class GapSolution:
    """Gap value with the derived band geometry and branch metadata.

    ``l`` and ``u`` are the band endpoints in dollars (ask valuation);
    everything downstream evaluates the closed forms through this object.
    """

    lambda_bar: float   # gap, dimensionless
    a: float            # sqrt(|mu_bar^2 - lam^2 - (1/2 - mu_bar)^2|) = sqrt(|kappa|)
    b: float            # 1/2 - lambda_bar (see module docstring)
    l: float            # buy boundary, dollars at ask
    u: float            # sell boundary, dollars at ask
    branch: Branch
    residual: float     # terminal boundary-condition residual
    mu_bar: float
    epsilon: float

    @property
    def kappa(self) -> float:
        """Signed discriminant mu_bar - 1/4 - lambda_bar^2."""
        return self.mu_bar - 0.25 - self.lambda_bar**2

    @property
    def y_max(self) -> float:
        """Band width in state coordinates, log(u/l)."""
        return math.log(self.u / self.l)


def _band_endpoints(mu_bar: float, epsilon: float, alpha: float, lam: float):
    l = (mu_bar - lam) / alpha
    u = (mu_bar + lam) / ((1.0 - epsilon) * alpha)
    return l, u


def make_gap_solution(
    mu_bar: float, epsilon: float, alpha: float, lam: float, residual: float = math.nan
) -> GapSolution:
    """Assemble a GapSolution for a candidate gap value (no root-finding)."""
    if not 0.0 < lam < mu_bar:
        raise ValueError(f"gap must lie in (0, mu_bar), got {lam}")
    kappa = mu_bar - 0.25 - lam**2
    l, u = _band_endpoints(mu_bar, epsilon, alpha, lam)
    return GapSolution(
        lambda_bar=lam,
        a=math.sqrt(abs(kappa)),
        b=0.5 - lam,
        l=l,
        u=u,
        branch=Branch.HYPERBOLIC if kappa < 0 else Branch.TRIGONOMETRIC,
        residual=residual,
        mu_bar=mu_bar,
        epsilon=epsilon,
    )


def _cos_sin_like(kappa: float, y):
    """C(y) = cos(sqrt(kappa) y) and S(y) = sin(sqrt(kappa) y)/sqrt(kappa).

    Entire in kappa; hyperbolic for kappa < 0, polynomial series near 0.
    """
    y = np.asarray(y, dtype=float)
    scale = kappa * float(np.max(y * y, initial=0.0))
    if abs(scale) < _SERIES_THRESHOLD:
        y2 = kappa * y * y
        c = 1.0 - y2 / 2.0 * (1.0 - y2 / 12.0)
        s = y * (1.0 - y2 / 6.0 * (1.0 - y2 / 20.0))
    elif kappa > 0:
        a = math.sqrt(kappa)
        c = np.cos(a * y)
        s = np.sin(a * y) / a
    else:
        a = math.sqrt(-kappa)
        c = np.cosh(a * y)
        s = np.sinh(a * y) / a
    return c, s


def _clamp_y(gap: GapSolution, y):
    """Clamp boundary-adjacent round-off into [0, y_max]; reject farther out."""
    y = np.asarray(y, dtype=float)
    y_max = gap.y_max
    tol = 1e-12 * y_max
    if np.any(y < -tol) or np.any(y > y_max + tol):
        raise DomainError(
            f"state coordinate outside [0, {y_max:.6g}] beyond tolerance"
        )
    return np.clip(y, 0.0, y_max)


def _w_raw(gap: GapSolution, y):
    """w without domain checks (y already validated/clamped)."""
    kappa = gap.kappa
    b = gap.b
    c, s = _cos_sin_like(kappa, y)
    m = gap.mu_bar - 0.5
    return m + (kappa * s + b * c) / (c - b * s)


def eval_w(gap: GapSolution, y):
    """Riccati solution w on [0, log(u/l)]; w(0) = mu_bar - lambda_bar."""
    return _w_raw(gap, _clamp_y(gap, y))


def eval_w_prime(gap: GapSolution, y):
    """w'(y), from the Riccati equation itself (exact, no differencing)."""
    w = eval_w(gap, y)
    m = gap.mu_bar - 0.5
    return (w - m) ** 2 + gap.kappa


def eval_k(gap: GapSolution, y):
    """k(y) = 1/(g'(e^y) e^y): strictly positive, strictly decreasing.

    k(0) = 1 and k(log(u/l)) = (mu_bar - lam)/(mu_bar + lam).
    """
    return (gap.mu_bar - gap.lambda_bar) / eval_w_prime(gap, y)


def eval_g(gap: GapSolution, y):
    """g(e^y): maps [0, log(u/l)] onto [1, (1 - eps) u/l], increasing."""
    return eval_w(gap, y) / (gap.mu_bar - gap.lambda_bar)


def eval_int_w(gap: GapSolution, y):
    """Antiderivative of w with value 0 at y = 0."""
    y = _clamp_y(gap, y)
    c, s = _cos_sin_like(gap.kappa, y)
    return (gap.mu_bar - 0.5) * y - np.log(c - gap.b * s)


def boundary_residual(mu_bar: float, epsilon: float, lam: float) -> float:
    """Terminal-condition residual w(lam, log(u/l)) - (mu_bar + lam).

    The band-width ratio u/l is alpha-free, so the residual is a function of
    (mu_bar, epsilon, lam) only.  Returns +inf when the candidate solution
    blows up inside the interval (pole of the tan/coth branch before the
    terminal point), which keeps bracketing root-finders on the correct side.
    """
    if not 0.0 < lam < mu_bar:
        raise ValueError(f"gap candidate must lie in (0, mu_bar), got {lam}")
    y_max = math.log((mu_bar + lam) / ((1.0 - epsilon) * (mu_bar - lam)))
    kappa = mu_bar - 0.25 - lam**2
    b = 0.5 - lam
    c, s = _cos_sin_like(kappa, y_max)
    den = float(c - b * s)
    if den <= 0.0:
        return math.inf
    w_end = (mu_bar - 0.5) + (kappa * float(s) + b * float(c)) / den
    if w_end < mu_bar - lam:
        # past a full tan period: not the branch containing y = 0
        return math.inf
    return w_end - (mu_bar + lam)
