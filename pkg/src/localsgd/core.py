"""Shared domain types for Local SGD experiments.

Local SGD runs n workers for T stochastic gradient steps.  A communication
schedule is the set of step indices at which all workers are replaced by
their average.  Everything downstream (simulation engine, admissibility
checks, convergence bounds) speaks in terms of the three small types defined
here plus the step-size rule eta_t = 2 / (mu * (t + beta)).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass


@dataclass(frozen=True)
class ProblemParams:
    """Strong convexity / smoothness constants and run dimensions."""

    mu: float     # strong convexity constant, > 0
    L: float      # smoothness constant, >= mu
    n: int        # number of workers
    T: int        # total number of local steps
    beta: float   # step-size offset in eta_t = 2 / (mu * (t + beta))

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.L < self.mu:
            raise ValueError(f"L must be >= mu, got L={self.L} < mu={self.mu}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        # beta <= 0 would make eta_0 infinite or negative; values in (0, 1]
        # are fine for running the dynamics even though the fixed-interval
        # bound formula additionally needs beta > 1.
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def kappa(self) -> float:
        """Condition number L / mu."""
        return self.L / self.mu


@dataclass(frozen=True)
class NoiseParams:
    """Strong-growth description of gradient noise.

    The noise e = g_hat(x) - grad F(x) of a stochastic gradient oracle is
    assumed to satisfy E[e] = 0 and E||e||^2 <= c * ||grad F(x)||^2 + sigma2.
    """

    c: float       # multiplicative noise coefficient, >= 0
    sigma2: float  # additive noise floor, >= 0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError(f"c must be >= 0, got {self.c}")
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")


@dataclass(frozen=True)
class Schedule:
    """Set of communication (averaging) times for a T-step run.

    comm_times lists the steps t in [1, T] after which workers average; it is
    strictly increasing and always ends at T, so every run finishes with all
    workers holding the same point.
    """

    T: int
    comm_times: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "comm_times", tuple(int(t) for t in self.comm_times))
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if not self.comm_times:
            raise ValueError("comm_times must not be empty")
        for a, b in zip(self.comm_times, self.comm_times[1:]):
            if b <= a:
                raise ValueError(f"comm_times must be strictly increasing, got {a} before {b}")
        if self.comm_times[0] < 1 or self.comm_times[-1] > self.T:
            raise ValueError(f"comm_times must lie in [1, T={self.T}], got {self.comm_times[0]}..{self.comm_times[-1]}")
        if self.comm_times[-1] != self.T:
            raise ValueError(f"comm_times must end at T={self.T}, got {self.comm_times[-1]}")

    @property
    def rounds(self) -> int:
        """Number of communication rounds R."""
        return len(self.comm_times)


def step_size(t: int, p: ProblemParams) -> float:
    """Step size eta_t = 2 / (mu * (t + beta)) for step index 0 <= t < T."""
    if not 0 <= t < p.T:
        raise ValueError(f"step index t={t} out of range [0, {p.T})")
    return 2.0 / (p.mu * (t + p.beta))


def last_comm(t: int, s: Schedule) -> int:
    """Most recent communication time tau(t) <= t, with tau = 0 before the first one."""
    if not 0 <= t <= s.T:
        raise ValueError(f"t={t} out of range [0, {s.T}]")
    i = bisect.bisect_right(s.comm_times, t)
    return s.comm_times[i - 1] if i > 0 else 0


def interval_lengths(s: Schedule) -> list[int]:
    """Gaps H_i between consecutive communications (first gap measured from t=0)."""
    prev = 0
    out = []
    for t in s.comm_times:
        out.append(t - prev)
        prev = t
    return out
