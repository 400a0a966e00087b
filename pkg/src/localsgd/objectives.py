"""Objectives for Local SGD simulations.

Two concrete objectives are provided: a quadratic with exactly-known
strong-growth noise (the calibration workhorse, every moment is available in
closed form) and L2-regularized logistic regression over a sparse dataset in
LIBSVM format.

Stochastic gradients are exposed two ways.  ``sample_grad(x, rng)`` draws one
gradient; the pair ``draw_noise`` / ``grads_from_noise`` separates the random
draws from their deterministic application so the engine can prefetch a
worker's noise in blocks.  Both routes consume a generator's bit stream in
the same order, so they produce bit-identical gradients.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy import sparse
from scipy.special import expit

from .core import NoiseParams

BUNDLED_SAMPLE_NAME = "adult_style_sample.libsvm"


class Objective:
    """Interface shared by simulation objectives.

    Concrete objectives set ``dim``, ``mu``, ``L`` and ``noise`` (a declared
    strong-growth envelope for their gradient noise) and implement the
    methods below.  Instances are immutable once constructed and safe to
    share across concurrently running trials.
    """

    dim: int
    mu: float
    L: float
    noise: NoiseParams

    def eval(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def f_star(self) -> float:
        """Minimum value of the objective."""
        raise NotImplementedError

    def default_x0(self) -> np.ndarray:
        return np.zeros(self.dim)

    def grad_multi(self, X: np.ndarray) -> np.ndarray:
        """Exact gradients at each row of X, shape (m, dim) -> (m, dim)."""
        return np.stack([self.grad(x) for x in X])

    def draw_noise(self, rng: np.random.Generator, steps: int) -> np.ndarray:
        """Raw per-step noise for one worker, shape (steps, k), consumed in step order."""
        raise NotImplementedError

    def grads_from_noise(self, X: np.ndarray, noise: np.ndarray) -> np.ndarray:
        """Stochastic gradients at rows of X (m, dim) given one noise row (m, k) each."""
        raise NotImplementedError

    def sample_grad(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One stochastic gradient at x; unbiased for grad(x)."""
        x = np.asarray(x, dtype=float)
        return self.grads_from_noise(x[None, :], self.draw_noise(rng, 1))[0]

    def _check_dim(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got shape {x.shape}")
        return x


class QuadraticStrongGrowth(Objective):
    """F(x) = 0.5 ||x||^2 with multiplicative plus additive gradient noise.

    A stochastic gradient at x is x * (1 + z1) + z2 with independent
    coordinates z1_i ~ N(0, c1), z2_i ~ N(0, c2).  Its noise second moment is
    exactly c1 * ||x||^2 + d * c2, so the strong-growth envelope holds with
    equality: c = c1 and sigma2 = d * c2.  mu = L = 1 and F* = 0.
    """

    def __init__(self, d: int = 3, c1: float = 9.0, c2: float = 0.25):
        if d < 1:
            raise ValueError(f"d must be >= 1, got {d}")
        if c1 < 0 or c2 < 0:
            raise ValueError(f"noise variances must be >= 0, got c1={c1}, c2={c2}")
        self.dim = d
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.mu = 1.0
        self.L = 1.0
        self.noise = NoiseParams(c=self.c1, sigma2=d * self.c2)
        self._s1 = self.c1 ** 0.5
        self._s2 = self.c2 ** 0.5

    def eval(self, x):
        x = self._check_dim(x)
        return 0.5 * float(x @ x)

    def grad(self, x):
        return self._check_dim(x).copy()

    def grad_multi(self, X):
        return np.array(X, dtype=float)

    def f_star(self):
        return 0.0

    def default_x0(self):
        return np.ones(self.dim)

    def draw_noise(self, rng, steps):
        return rng.standard_normal((steps, 2 * self.dim))

    def grads_from_noise(self, X, noise):
        d = self.dim
        z1 = self._s1 * noise[:, :d]
        z2 = self._s2 * noise[:, d:]
        return X * (1.0 + z1) + z2


class LibsvmParseError(ValueError):
    """Raised for malformed LIBSVM input, with the offending line number."""


def parse_libsvm(text: str | Iterable[str], d_hint: int | None = None) -> "Dataset":
    """Parse LIBSVM-format lines ``label idx:val idx:val ...`` into a Dataset.

    Labels must be -1/+1 or 0/1 (mapped to 0/1); feature indices are 1-based
    in the file and 0-based in the result.  The dimension is the largest
    index seen, or ``d_hint`` if that is larger.  Blank lines are skipped.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    labels: list[float] = []
    row_idx: list[int] = []
    col_idx: list[int] = []
    values: list[float] = []
    max_index = 0
    n_rows = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise LibsvmParseError(f"line {lineno}: non-numeric label {tokens[0]!r}") from None
        if label not in (-1.0, 0.0, 1.0):
            raise LibsvmParseError(f"line {lineno}: label must be -1, 0 or +1, got {tokens[0]!r}")
        seen: set[int] = set()
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise LibsvmParseError(f"line {lineno}: malformed feature token {tok!r}")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise LibsvmParseError(f"line {lineno}: non-numeric feature token {tok!r}") from None
            if idx <= 0:
                raise LibsvmParseError(f"line {lineno}: feature index must be >= 1, got {idx}")
            if idx in seen:
                raise LibsvmParseError(f"line {lineno}: duplicate feature index {idx}")
            seen.add(idx)
            row_idx.append(n_rows)
            col_idx.append(idx - 1)
            values.append(val)
            max_index = max(max_index, idx)
        labels.append(1.0 if label == 1.0 else 0.0)
        n_rows += 1
    if n_rows == 0:
        raise LibsvmParseError("no data lines found")
    d = max(max_index, d_hint or 0)
    features = sparse.csr_matrix(
        (values, (row_idx, col_idx)), shape=(n_rows, d), dtype=float
    )
    return Dataset(features, np.asarray(labels))


def load_libsvm(path: str | Path, d_hint: int | None = None) -> "Dataset":
    """Read a LIBSVM file from disk."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_libsvm(fh, d_hint=d_hint)


def bundled_sample_path() -> Path:
    """Path of the small binary-classification sample shipped with the package."""
    return Path(resources.files("localsgd").joinpath("data", BUNDLED_SAMPLE_NAME))


class Dataset:
    """Sparse binary-classification data: CSR feature matrix plus 0/1 labels."""

    def __init__(self, features: sparse.csr_matrix, labels: np.ndarray):
        labels = np.asarray(labels, dtype=float)
        if features.ndim != 2 or features.shape[0] < 1:
            raise ValueError("features must be a nonempty 2-d matrix")
        if labels.shape != (features.shape[0],):
            raise ValueError(f"labels shape {labels.shape} does not match {features.shape[0]} rows")
        if not np.all((labels == 0.0) | (labels == 1.0)):
            raise ValueError("labels must be 0 or 1")
        self.features = sparse.csr_matrix(features)
        self.labels = labels

    @classmethod
    def from_dense(cls, X, labels) -> "Dataset":
        """Build from a dense array; -1 labels are mapped to 0."""
        labels = np.asarray(labels, dtype=float)
        labels = np.where(labels == -1.0, 0.0, labels)
        return cls(sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=float))), labels)

    @property
    def n_points(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def max_row_sqnorm(self) -> float:
        return float(self.features.multiply(self.features).sum(axis=1).max())


class LogisticL2(Objective):
    """L2-regularized logistic regression over a Dataset.

    F(x) = (1/N) sum_j [ softplus(x . A_j) - b_j * (x . A_j) ] + (lam/2) ||x||^2

    with softplus(z) = ln(1 + e^z) evaluated as max(z, 0) + ln(1 + e^-|z|)
    for stability.  mu = lam and L = lam + max_j ||A_j||^2 / 4.  A stochastic
    gradient averages ``batch`` points drawn uniformly with replacement.  The
    declared noise envelope is the uniform bound c = 0,
    sigma2 = max_j ||A_j||^2 / batch (single-point gradient noise can never
    exceed the largest squared row norm).
    """

    def __init__(self, data: Dataset, lam: float, batch: int = 1,
                 f_star: float | None = None):
        if lam <= 0:
            raise ValueError(f"lam must be positive, got {lam}")
        if batch < 1:
            raise ValueError(f"batch must be >= 1, got {batch}")
        self.data = data
        self.lam = float(lam)
        self.batch = int(batch)
        self.dim = data.dim
        self.mu = self.lam
        max_sq = data.max_row_sqnorm()
        self.L = self.lam + 0.25 * max_sq
        self.noise = NoiseParams(c=0.0, sigma2=max_sq / self.batch)
        self._fstar = f_star
        # dense row cache: minibatch row gathers are much faster on an
        # ndarray, and desk-scale datasets fit easily
        if data.n_points * data.dim <= 20_000_000:
            self._rows = data.features.toarray()
        else:
            self._rows = None

    def eval(self, x):
        x = self._check_dim(x)
        z = self.data.features @ x
        softplus = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
        data_term = float(np.mean(softplus - self.data.labels * z))
        return data_term + 0.5 * self.lam * float(x @ x)

    def grad(self, x):
        x = self._check_dim(x)
        z = self.data.features @ x
        r = expit(z) - self.data.labels
        return self.data.features.T @ r / self.data.n_points + self.lam * x

    def grad_multi(self, X):
        X = np.asarray(X, dtype=float)
        Z = self.data.features @ X.T                      # (N, m)
        Rm = expit(Z) - self.data.labels[:, None]
        return (self.data.features.T @ Rm).T / self.data.n_points + self.lam * X

    def f_star(self):
        if self._fstar is None:
            self._fstar = estimate_fstar(self, tol=1e-8)
        return self._fstar

    def draw_noise(self, rng, steps):
        return rng.integers(0, self.data.n_points, size=(steps, self.batch))

    def grads_from_noise(self, X, noise):
        m = X.shape[0]
        flat = noise.reshape(-1)
        if self._rows is not None:
            D = self._rows[flat].reshape(m, self.batch, self.dim)
        else:
            D = self.data.features[flat].toarray().reshape(m, self.batch, self.dim)
        z = np.einsum("wbd,wd->wb", D, X)
        r = expit(z) - self.data.labels[flat].reshape(m, self.batch)
        return np.einsum("wbd,wb->wd", D, r) / self.batch + self.lam * X


def estimate_fstar(obj: Objective, tol: float = 1e-8, max_iter: int = 500_000) -> float:
    """Minimum value via full-gradient descent with fixed step 1/L.

    Iterates from the objective's default start until ||grad F|| <= tol * mu,
    which by strong convexity pins the returned value within tol^2 * mu / 2
    of the true minimum.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    x = obj.default_x0()
    target = tol * obj.mu
    step = 1.0 / obj.L
    for _ in range(max_iter):
        g = obj.grad(x)
        if float(np.linalg.norm(g)) <= target:
            return obj.eval(x)
        x = x - step * g
    raise RuntimeError(
        f"gradient descent did not reach ||grad|| <= {target:.3e} within "
        f"{max_iter} iterations (current {float(np.linalg.norm(obj.grad(x))):.3e})"
    )
