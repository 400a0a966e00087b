"""Communication schedule constructors and admissibility checks.

A schedule is admissible for a problem (mu, L, n, beta) under strong-growth
noise (c, sigma2) when every inter-communication interval i with start tau_i
and length H_i satisfies

    9 kappa^2 c ln(1 + (H_i - 1) / (tau_i + beta)) + 2 kappa (1 + c / n)
        <= tau_i + 1 + beta

and beta >= 2 kappa^2.  Admissible schedules are the ones whose runs are
covered by the convergence bounds in :mod:`localsgd.bounds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import NoiseParams, ProblemParams, Schedule, interval_lengths

# min_beta never returns less than this: the fixed-interval bound divides by
# beta - 1, so a strictly-greater-than-one floor keeps it finite.
_BETA_FLOOR = 1.0 + 1e-9


def synchronous(T: int) -> Schedule:
    """Averaging after every step: Local SGD degenerates to serial SGD on the average gradient."""
    return Schedule(T, tuple(range(1, T + 1)))


def one_shot(T: int) -> Schedule:
    """A single averaging at the end of the run."""
    return Schedule(T, (T,))


def fixed_interval(T: int, H: int) -> Schedule:
    """Averaging every H steps, plus a final averaging at T if H does not divide T."""
    if not 1 <= H <= T:
        raise ValueError(f"H must be in [1, T={T}], got {H}")
    times = list(range(H, T + 1, H))
    if times[-1] != T:
        times.append(T)
    return Schedule(T, tuple(times))


def growing(T: int, R: int, a: int | None = None) -> Schedule:
    """Linearly growing intervals H_i = a * (i + 1) with at most R rounds.

    The default coefficient a = ceil(2T / R^2) packs the R rounds into the
    horizon; communication times are tau_{i+1} = min(tau_i + H_i, T), and
    construction stops early once T is reached.  Passing an explicit ``a``
    overrides the coefficient (the schedule then typically uses fewer than R
    rounds).
    """
    if not (1 <= R and R * R <= 2 * T):
        raise ValueError(f"R must satisfy 1 <= R <= sqrt(2T), got R={R} for T={T}")
    if a is None:
        a = math.ceil(2 * T / (R * R))
    elif a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    times = []
    tau = 0
    for i in range(R):
        tau = min(tau + a * (i + 1), T)
        times.append(tau)
        if tau == T:
            break
    return Schedule(T, tuple(times))


@dataclass(frozen=True)
class IntervalCheck:
    """Admissibility condition evaluated on one inter-communication interval."""

    index: int    # interval number i, starting at 0
    start: int    # tau_i, the communication time opening the interval (0 for the first)
    length: int   # H_i
    lhs: float    # condition value; admissible iff <= 0
    ok: bool


@dataclass(frozen=True)
class AdmissibilityReport:
    beta_ok: bool
    intervals: tuple[IntervalCheck, ...]

    @property
    def overall(self) -> bool:
        return self.beta_ok and all(iv.ok for iv in self.intervals)


def validate(s: Schedule, p: ProblemParams, nz: NoiseParams) -> AdmissibilityReport:
    """Check beta >= 2 kappa^2 and the per-interval admissibility condition."""
    if s.T != p.T:
        raise ValueError(f"schedule horizon {s.T} != problem horizon {p.T}")
    k = p.kappa
    checks = []
    tau = 0
    for i, H in enumerate(interval_lengths(s)):
        lhs = (9.0 * k * k * nz.c * math.log1p((H - 1) / (tau + p.beta))
               + 2.0 * k * (1.0 + nz.c / p.n)
               - (tau + 1 + p.beta))
        checks.append(IntervalCheck(i, tau, H, lhs, lhs <= 0.0))
        tau += H
    return AdmissibilityReport(p.beta >= 2.0 * k * k, tuple(checks))


def min_beta(mu: float, L: float, n: int, nz: NoiseParams, T: int,
             R: int | None = None) -> float:
    """Smallest step-size offset that makes the target schedule family admissible.

    Without R the value covers any schedule (it controls the worst case of a
    single interval of length T); with R it covers the growing schedule with
    R rounds, which has shorter early intervals and therefore tolerates a
    smaller offset.
    """
    if mu <= 0 or L < mu:
        raise ValueError(f"need L >= mu > 0, got mu={mu}, L={L}")
    if n < 1 or T < 1:
        raise ValueError(f"need n >= 1 and T >= 1, got n={n}, T={T}")
    k = L / mu
    if R is None:
        b = max(9.0 * k * k * nz.c * math.log1p(T / (2.0 * k * k))
                + 2.0 * k * (1.0 + nz.c / n),
                2.0 * k * k)
    else:
        if not (1 <= R and R * R <= 2 * T):
            raise ValueError(f"R must satisfy 1 <= R <= sqrt(2T), got R={R} for T={T}")
        b = max(2.0 * k * k,
                9.0 * k * k * nz.c * max(math.log(3.0), math.log1p(T / (R * R * k * k)))
                + 2.0 * k * (1.0 + nz.c / n))
    return max(b, _BETA_FLOOR)
