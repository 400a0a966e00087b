"""
Linear speedup in the number of workers.

With a growing-interval schedule of only R = n communication rounds, the
final error of Local SGD still scales like sigma2 / (mu n T): doubling the
worker count halves the error.  The sweep plots measured final
suboptimality against that reference line.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import localsgd as lsg

T = 2000
TRIALS = 200
SEED = 1
WORKERS = [5, 10, 20, 40]
OUT = "speedup.png"

obj = lsg.QuadraticStrongGrowth()

errors = []
refs = []
for n in WORKERS:
    p = lsg.ProblemParams(mu=1.0, L=1.0, n=n, T=T, beta=1.0)
    agg = lsg.run_trials(obj, lsg.growing(T, n), p, SEED, TRIALS, stride=T, threads=4)
    errors.append(agg.mean_subopt[-1])
    refs.append(obj.noise.sigma2 / (n * T))
    print(f"n={n:3d} rounds={lsg.growing(T, n).rounds:3d} "
          f"final subopt={errors[-1]:.3e} reference={refs[-1]:.3e}")

plt.figure(figsize=(5.5, 4))
plt.loglog(WORKERS, errors, "o-", label="measured, R = n rounds")
plt.loglog(WORKERS, refs, "k--", label="sigma2 / (mu n T)")
plt.xlabel("workers n")
plt.ylabel("final suboptimality")
plt.title(f"T = {T}, {TRIALS} trials")
plt.legend()
plt.tight_layout()
plt.savefig(OUT, dpi=120)
print(f"wrote {OUT}")
