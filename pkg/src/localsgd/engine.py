"""Local SGD simulation engine.

Each of n workers starts at the same x0 and takes T stochastic gradient
steps with eta_t = 2 / (mu (t + beta)); after every step t+1 in the
schedule's communication set, all workers are replaced by their average.
Metrics are recorded on the virtual average xbar_t even between
communications.

Randomness is counter-based: worker w of a run with seed s draws from
Generator(Philox(SeedSequence(s, spawn_key=(w,)))), consumed in step order,
and trial i of a multi-trial run uses a seed derived from (master_seed, i).
Worker and trial streams are therefore disjoint and independent of execution
order, which makes runs bit-reproducible at any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .core import ProblemParams, Schedule
from .objectives import Objective

NOISE_CHUNK = 4096  # steps of per-worker noise prefetched at a time


class DivergenceError(RuntimeError):
    """Raised when an iterate stops being finite."""


def trial_seed(master_seed: int, trial: int) -> int:
    """Seed for one trial of a multi-trial run, derived from (master_seed, trial)."""
    return int(SeedSequence(master_seed, spawn_key=(trial,)).generate_state(1, np.uint64)[0])


def worker_streams(seed: int, n: int) -> list[Generator]:
    """The n disjoint per-worker generators used by a run with this seed."""
    return [Generator(Philox(SeedSequence(seed, spawn_key=(w,)))) for w in range(n)]


def worker_average(states: np.ndarray) -> np.ndarray:
    """Average of worker rows.

    Computed relative to worker 0 so that averaging identical rows returns
    the shared row bit-exactly.
    """
    return states[0] + (states - states[0]).mean(axis=0)


def consensus_error(states: np.ndarray) -> float:
    """sum_i ||x_i - xbar||^2 via the identity sum ||u_i||^2 - n ||ubar||^2.

    The identity is applied to u_i = x_i - x_0, which leaves the value
    unchanged but makes it exactly zero when all workers coincide.  Clamped
    at zero to absorb last-bit cancellation.
    """
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[0] < 1:
        raise ValueError(f"expected a (workers, dim) array, got shape {states.shape}")
    u = states - states[0]
    ubar = u.mean(axis=0)
    total = float(np.einsum("ij,ij->", u, u)) - states.shape[0] * float(ubar @ ubar)
    return max(total, 0.0)


def default_stride(T: int) -> int:
    """Metric recording stride: every step up to T = 10^4, thinned beyond."""
    return 1 if T <= 10_000 else math.ceil(T / 10_000)


@dataclass(frozen=True)
class Trace:
    """Metrics of one run, sampled at the recorded step indices."""

    t: np.ndarray            # recorded steps; starts at 0, ends at T
    subopt: np.ndarray       # F(xbar_t) - F*
    consensus: np.ndarray    # sum_i ||x_i - xbar_t||^2
    grad_sqnorm: np.ndarray  # (1/n) sum_i ||grad F(x_i)||^2
    comms: np.ndarray        # cumulative communications up to t


@dataclass(frozen=True)
class AggregateTrace:
    """Mean and spread of per-trial metrics on a shared recording grid."""

    t: np.ndarray
    mean_subopt: np.ndarray
    std_subopt: np.ndarray
    mean_consensus: np.ndarray
    std_consensus: np.ndarray
    mean_grad_sqnorm: np.ndarray
    std_grad_sqnorm: np.ndarray
    comms: np.ndarray
    trials: int


def _check_setup(obj: Objective, s: Schedule, p: ProblemParams, x0) -> np.ndarray:
    if s.T != p.T:
        raise ValueError(f"schedule horizon {s.T} != problem horizon {p.T}")
    if not (math.isclose(obj.mu, p.mu, rel_tol=1e-9) and math.isclose(obj.L, p.L, rel_tol=1e-9)):
        raise ValueError(
            f"problem constants (mu={p.mu}, L={p.L}) disagree with the "
            f"objective's (mu={obj.mu}, L={obj.L})"
        )
    x0 = obj.default_x0() if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (obj.dim,):
        raise ValueError(f"x0 shape {x0.shape} does not match objective dimension {obj.dim}")
    return x0


def run_local_sgd(obj: Objective, s: Schedule, p: ProblemParams, seed: int,
                  x0: np.ndarray | None = None, stride: int | None = None) -> Trace:
    """Simulate one Local SGD run and return its Trace.

    Records at multiples of ``stride`` (default: :func:`default_stride`),
    at every communication time, and at t = 0 and t = T.
    """
    x0 = _check_setup(obj, s, p, x0)
    n, T = p.n, p.T
    if stride is None or stride == 0:
        stride = default_stride(T)
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    record_set = set(range(0, T + 1, stride)) | set(s.comm_times) | {0, T}
    comm_set = frozenset(s.comm_times)
    fstar = obj.f_star()
    streams = worker_streams(seed, n)

    X = np.tile(x0, (n, 1))
    comms = 0
    rows: list[tuple[int, float, float, float, int]] = []

    def snap(t: int):
        xbar = worker_average(X)
        g = obj.grad_multi(X)
        rows.append((
            t,
            obj.eval(xbar) - fstar,
            consensus_error(X),
            float(np.einsum("ij,ij->", g, g)) / n,
            comms,
        ))

    snap(0)
    t = 0
    while t < T:
        m = min(NOISE_CHUNK, T - t)
        noise = np.stack([obj.draw_noise(st, m) for st in streams])  # (n, m, k)
        for j in range(m):
            eta = 2.0 / (p.mu * (t + p.beta))
            X = X - eta * obj.grads_from_noise(X, noise[:, j])
            t += 1
            if not np.all(np.isfinite(X)):
                raise DivergenceError(f"non-finite iterate at step t={t}")
            if t in comm_set:
                X = np.repeat(worker_average(X)[None, :], n, axis=0)
                comms += 1
            if t in record_set:
                snap(t)

    ts, subopt, cons, gsq, cc = zip(*rows)
    return Trace(
        t=np.asarray(ts, dtype=int),
        subopt=np.asarray(subopt),
        consensus=np.asarray(cons),
        grad_sqnorm=np.asarray(gsq),
        comms=np.asarray(cc, dtype=int),
    )


def run_trials(obj: Objective, s: Schedule, p: ProblemParams, master_seed: int,
               trials: int, x0: np.ndarray | None = None, stride: int | None = None,
               threads: int = 1) -> AggregateTrace:
    """Run independent trials and aggregate their traces pointwise.

    Trial i uses :func:`trial_seed`(master_seed, i), so results do not depend
    on ``threads``; aggregation always happens in trial order.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    obj.f_star()  # warm the cached minimum before any thread pool starts

    def one(i: int) -> Trace:
        try:
            return run_local_sgd(obj, s, p, trial_seed(master_seed, i), x0=x0, stride=stride)
        except DivergenceError as e:
            raise DivergenceError(f"trial {i}: {e}") from None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(one, range(trials)))
    else:
        traces = [one(i) for i in range(trials)]

    sub = np.stack([tr.subopt for tr in traces])
    con = np.stack([tr.consensus for tr in traces])
    gsq = np.stack([tr.grad_sqnorm for tr in traces])
    return AggregateTrace(
        t=traces[0].t.copy(),
        mean_subopt=sub.mean(axis=0),
        std_subopt=sub.std(axis=0),
        mean_consensus=con.mean(axis=0),
        std_consensus=con.std(axis=0),
        mean_grad_sqnorm=gsq.mean(axis=0),
        std_grad_sqnorm=gsq.std(axis=0),
        comms=traces[0].comms.copy(),
        trials=trials,
    )
