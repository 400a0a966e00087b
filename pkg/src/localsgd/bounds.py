"""Convergence bound evaluators for Local SGD with step size 2 / (mu (t + beta)).

All bounds target the expected final suboptimality E[F(xbar_T) - F*] of an
admissible run started at suboptimality xi0.  The general bound works for any
schedule through the lag sum sum_{t<T} (t - tau(t)) / (t + beta), where
tau(t) is the last communication at or before t; the fixed-interval and
growing-interval bounds are closed forms that dominate it for their schedule
families.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .core import NoiseParams, ProblemParams, Schedule
from .schedules import validate


def lag_sum(s: Schedule, beta: float) -> float:
    """sum_{t=0}^{T-1} (t - tau(t)) / (t + beta) for the schedule's communication times."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    t = np.arange(s.T, dtype=float)
    comm = np.asarray(s.comm_times, dtype=float)
    pos = np.searchsorted(comm, t, side="right")
    tau = np.where(pos > 0, comm[np.maximum(pos - 1, 0)], 0.0)
    return float(np.sum((t - tau) / (t + beta)))


def _common_terms(xi0: float, p: ProblemParams, nz: NoiseParams) -> tuple[float, float]:
    if xi0 < 0:
        raise ValueError(f"xi0 must be >= 0, got {xi0}")
    bias = p.beta ** 2 * xi0 / p.T ** 2
    stat = 2.0 * p.L * nz.sigma2 / (p.n * p.mu ** 2 * p.T)
    return bias, stat


def bound_general(xi0: float, s: Schedule, p: ProblemParams, nz: NoiseParams,
                  check: bool = True) -> float:
    """Suboptimality bound for an arbitrary schedule.

    xi0 beta^2 / T^2 + 2 L sigma2 / (n mu^2 T)
        + (9 L^2 sigma2 / (mu^3 T^2)) * lag_sum(s, beta)

    With ``check=True`` an inadmissible (schedule, problem, noise) triple
    produces a warning: the returned number is then the formula value only,
    not a guaranteed bound.
    """
    if check and not validate(s, p, nz).overall:
        warnings.warn(
            "schedule fails the admissibility condition for these parameters; "
            "returning the formula value only",
            stacklevel=2,
        )
    bias, stat = _common_terms(xi0, p, nz)
    drift = 9.0 * p.L ** 2 * nz.sigma2 / (p.mu ** 3 * p.T ** 2) * lag_sum(s, p.beta)
    return bias + stat + drift


def bound_fixed(xi0: float, H: int, p: ProblemParams, nz: NoiseParams) -> float:
    """Closed-form suboptimality bound for averaging every H steps.

    Requires beta > 1 (the drift term carries ln(1 + T / (beta - 1))).
    """
    if not 1 <= H <= p.T:
        raise ValueError(f"H must be in [1, T={p.T}], got {H}")
    if not p.beta > 1:
        raise ValueError(f"fixed-interval bound needs beta > 1, got {p.beta}")
    bias, stat = _common_terms(xi0, p, nz)
    drift = (9.0 * p.L ** 2 * nz.sigma2 * (H - 1)
             * math.log1p(p.T / (p.beta - 1.0)) / (p.mu ** 3 * p.T ** 2))
    return bias + stat + drift


def bound_growing(xi0: float, R: int, p: ProblemParams, nz: NoiseParams) -> float:
    """Closed-form suboptimality bound for the growing schedule with R rounds.

    xi0 beta^2 / T^2 + 2 L sigma2 / (n mu^2 T) + 72 L^2 sigma2 / (mu^3 T R)
    """
    if not (1 <= R and R * R <= 2 * p.T):
        raise ValueError(f"R must satisfy 1 <= R <= sqrt(2T), got R={R} for T={p.T}")
    bias, stat = _common_terms(xi0, p, nz)
    drift = 72.0 * p.L ** 2 * nz.sigma2 / (p.mu ** 3 * p.T * R)
    return bias + stat + drift


def phi_bound_check(a: int, b: int) -> tuple[float, float]:
    """Step-size product prod_{i=a}^{b} (1 - 2/i) and its bound (a / (b+1))^2.

    The product is the contraction accumulated by steps 2/i over i in [a, b];
    it never exceeds (a / (b+1))^2 for b >= a > 2.  Returns (product, bound).
    """
    if not (b >= a and a > 2):
        raise ValueError(f"need b >= a > 2, got a={a}, b={b}")
    prod = 1.0
    for i in range(a, b + 1):
        prod *= 1.0 - 2.0 / i
    return prod, (a / (b + 1.0)) ** 2
