"""
Compare averaging schedules on the noisy quadratic.

Runs the same problem (T = 1000 steps, 20 workers, step size 2/(t+1)) under
four communication patterns and plots mean suboptimality and consensus error
over time.  Synchronous averaging is best, the one-shot average worst, and
the growing-interval schedule tracks synchronous with 26 rounds instead of
1000.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import localsgd as lsg

T = 1000
N_WORKERS = 20
TRIALS = 100
SEED = 1
OUT = "schedule_comparison.png"

obj = lsg.QuadraticStrongGrowth()
p = lsg.ProblemParams(mu=1.0, L=1.0, n=N_WORKERS, T=T, beta=1.0)

runs = [
    ("every step", lsg.synchronous(T)),
    ("growing, 26 rounds", lsg.growing(T, 26)),
    ("every 25 steps", lsg.fixed_interval(T, 25)),
    ("once at the end", lsg.one_shot(T)),
]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
for label, sched in runs:
    agg = lsg.run_trials(obj, sched, p, SEED, TRIALS, threads=4)
    ax1.loglog(agg.t[1:], agg.mean_subopt[1:], label=f"{label} ({sched.rounds} comms)")
    mask = agg.mean_consensus > 0
    ax2.loglog(agg.t[mask], agg.mean_consensus[mask], label=label)
    print(f"{label:22s} rounds={sched.rounds:4d} final subopt={agg.mean_subopt[-1]:.3e}")

ax1.set_xlabel("step t")
ax1.set_ylabel("mean F(xbar_t) - F*")
ax1.set_title(f"suboptimality, {TRIALS} trials")
ax1.legend()
ax2.set_xlabel("step t")
ax2.set_ylabel("mean consensus error")
ax2.set_title("disagreement between workers")
fig.tight_layout()
fig.savefig(OUT, dpi=120)
print(f"wrote {OUT}")
