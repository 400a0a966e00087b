"""Local SGD simulation lab.

Simulate multi-worker Local SGD under configurable communication schedules,
check schedule admissibility, and evaluate the matching convergence bounds.
"""

from .bounds import bound_fixed, bound_general, bound_growing, lag_sum, phi_bound_check
from .core import (
    NoiseParams,
    ProblemParams,
    Schedule,
    interval_lengths,
    last_comm,
    step_size,
)
from .engine import (
    AggregateTrace,
    DivergenceError,
    Trace,
    consensus_error,
    default_stride,
    run_local_sgd,
    run_trials,
    trial_seed,
    worker_average,
    worker_streams,
)
from .objectives import (
    Dataset,
    LibsvmParseError,
    LogisticL2,
    Objective,
    QuadraticStrongGrowth,
    bundled_sample_path,
    estimate_fstar,
    load_libsvm,
    parse_libsvm,
)
from .schedules import (
    AdmissibilityReport,
    IntervalCheck,
    fixed_interval,
    growing,
    min_beta,
    one_shot,
    synchronous,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "AggregateTrace",
    "Dataset",
    "DivergenceError",
    "IntervalCheck",
    "LibsvmParseError",
    "LogisticL2",
    "NoiseParams",
    "Objective",
    "ProblemParams",
    "QuadraticStrongGrowth",
    "Schedule",
    "Trace",
    "bound_fixed",
    "bound_general",
    "bound_growing",
    "bundled_sample_path",
    "consensus_error",
    "default_stride",
    "estimate_fstar",
    "fixed_interval",
    "growing",
    "interval_lengths",
    "lag_sum",
    "last_comm",
    "load_libsvm",
    "min_beta",
    "one_shot",
    "parse_libsvm",
    "phi_bound_check",
    "run_local_sgd",
    "run_trials",
    "step_size",
    "synchronous",
    "trial_seed",
    "validate",
    "worker_average",
    "worker_streams",
]
