"""
Measured error versus the convergence bounds.

Picks the minimal admissible step-size offset beta for each schedule, checks
admissibility interval by interval, and compares the measured mean final
suboptimality (with a 95% interval) against the general and closed-form
bound values.  The bounds are loose by design; the point is that the
measurement always sits below them.
"""
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import localsgd as lsg

T = 1000
N_WORKERS = 20
TRIALS = 150
SEED = 1
OUT = "bound_vs_measured.png"

obj = lsg.QuadraticStrongGrowth()
nz = obj.noise
xi0 = obj.eval(obj.default_x0())  # start at ones: F(x0) - F* = 1.5

cases = [
    ("sync", lsg.synchronous(T), None),
    ("fixed H=25", lsg.fixed_interval(T, 25), None),
    ("growing R=26", lsg.growing(T, 26), 26),
]

labels, measured, halfwidth, bounds = [], [], [], []
for label, sched, R in cases:
    beta = lsg.min_beta(1.0, 1.0, N_WORKERS, nz, T, R=R)
    p = lsg.ProblemParams(mu=1.0, L=1.0, n=N_WORKERS, T=T, beta=beta)
    report = lsg.validate(sched, p, nz)
    print(f"{label}: beta={beta:.2f} rounds={sched.rounds} "
          f"admissible={report.overall}")
    agg = lsg.run_trials(obj, sched, p, SEED, TRIALS, stride=T, threads=4)
    labels.append(label)
    measured.append(agg.mean_subopt[-1])
    halfwidth.append(1.96 * agg.std_subopt[-1] / math.sqrt(TRIALS))
    bounds.append(lsg.bound_general(xi0, sched, p, nz))
    print(f"  measured={measured[-1]:.3e} +- {halfwidth[-1]:.1e} "
          f"bound_general={bounds[-1]:.3e}")

x = np.arange(len(labels))
plt.figure(figsize=(6, 4))
plt.bar(x - 0.18, measured, 0.36, yerr=halfwidth, capsize=4, label="measured")
plt.bar(x + 0.18, bounds, 0.36, label="bound")
plt.yscale("log")
plt.xticks(x, labels)
plt.ylabel("final suboptimality")
plt.title(f"T = {T}, n = {N_WORKERS}, minimal admissible beta")
plt.legend()
plt.tight_layout()
plt.savefig(OUT, dpi=120)
print(f"wrote {OUT}")
