"""Regenerate the bundled LIBSVM sample shipped in src/localsgd/data/.

The file imitates the shape of the adult census benchmark in its standard
LIBSVM form: 123 binary features, about 14 active features per row, labels
-1/+1.  Rows are synthetic; labels come from a planted logistic model so the
data is actually learnable.  Deterministic by construction, so rerunning
this script reproduces the committed file byte for byte.
"""

from pathlib import Path

import numpy as np

N = 500
D = 123
ACTIVE = 14
SEED = 1789

OUT = Path(__file__).resolve().parents[1] / "src" / "localsgd" / "data" / "adult_style_sample.libsvm"


def main():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(SEED)))
    w = rng.normal(0.0, 0.6, size=D)
    bias = -0.3
    lines = []
    for i in range(N):
        if i == 0:
            # pin the last feature so the parsed dimension is exactly D
            idx = np.sort(np.concatenate([rng.choice(D - 1, size=ACTIVE - 1, replace=False), [D - 1]]))
        else:
            idx = np.sort(rng.choice(D, size=ACTIVE, replace=False))
        z = w[idx].sum() + bias
        p = 1.0 / (1.0 + np.exp(-z))
        label = 1 if rng.random() < p else -1
        feats = " ".join(f"{j + 1}:1" for j in idx)
        lines.append(f"{label:+d} {feats}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="ascii")
    print(f"wrote {N} rows, d={D} -> {OUT}")


if __name__ == "__main__":
    main()
