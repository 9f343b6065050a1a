"""The SGNS objective as a function of the score matrix ``X = W C^T``.

Each cell contributes ``a log s(x) + b log s(-x)`` with ``a = #(w,c)`` and
``b = k #(w) #(c) / |D|``; the expectation over negative contexts is already
folded into ``b``.  ``b`` is never materialized as a full matrix outside of the
row block being processed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .corpus import CooccurrenceStats
from .errors import ContractError, DegenerateCorpusError

# rows per block when sweeping the dense n x m score matrix
_ROW_BLOCK = 256


class InitMode(str, enum.Enum):
    SVD_SPPMI = "svd-sppmi"
    RANDOM = "random"
    PROVIDED = "provided"


# (step size, iterations) by embedding dimension, tuned on enwik9
DEFAULT_SCHEDULE = {100: (5e-5, 7), 200: (5e-5, 8), 500: (1e-4, 2)}


def default_schedule(dimension: int) -> tuple[float, int]:
    """Step size and iteration count for ``dimension``.

    Dimensions other than 100/200/500 use the entry of the nearest tabulated
    dimension (ties go to the smaller one).
    """
    nearest = min(DEFAULT_SCHEDULE, key=lambda d: (abs(d - dimension), d))
    return DEFAULT_SCHEDULE[nearest]


@dataclass(frozen=True)
class SgnsConfig:
    dimension: int
    negative_samples: int = 5
    step_size: float | None = None
    iterations: int | None = None
    init_mode: InitMode = InitMode.SVD_SPPMI

    def __post_init__(self):
        if self.dimension < 1:
            raise ContractError("dimension must be positive")
        if self.negative_samples < 1:
            raise ContractError("negative_samples must be >= 1")
        step, iters = default_schedule(self.dimension)
        if self.step_size is None:
            object.__setattr__(self, "step_size", step)
        if self.iterations is None:
            object.__setattr__(self, "iterations", iters)
        if not self.step_size > 0:
            raise ContractError("step_size must be > 0")
        if self.iterations < 0:
            raise ContractError("iterations must be >= 0")
        object.__setattr__(self, "init_mode", InitMode(self.init_mode))

    def check_shape(self, n: int, m: int) -> None:
        if self.dimension > min(n, m):
            raise ContractError(f"dimension {self.dimension} exceeds min(n, m) = {min(n, m)}")


def sigmoid(x):
    """Logistic function, evaluated without overflow for any finite input."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out if out.ndim else float(out)


def log_sigmoid(x):
    """``log(sigmoid(x))``; tends to ``x`` (not ``-inf``) for very negative ``x``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = -np.log1p(np.exp(-x[pos]))
    xn = x[~pos]
    out[~pos] = xn - np.log1p(np.exp(xn))
    return out if out.ndim else float(out)


def pair_loss(a, b, x):
    """Per-cell objective ``a log s(x) + b log s(-x)``."""
    return np.multiply(a, log_sigmoid(x)) + np.multiply(b, log_sigmoid(np.negative(x)))


def negative_weights(stats: CooccurrenceStats, k: int):
    """Row and column factors whose outer product is ``b``: ``b[w,c] = r[w] * col[c]``."""
    if stats.total_pairs == 0:
        raise DegenerateCorpusError("corpus has no word-context pairs (|D| = 0)")
    rows = stats.word_marginals.astype(np.float64) * (k / stats.total_pairs)
    return rows, stats.context_marginals.astype(np.float64)


def _check_shape(X, stats):
    if X.shape != (stats.n, stats.m):
        raise ContractError(f"score matrix shape {X.shape} does not match statistics ({stats.n}, {stats.m})")


def _row_blocks(n):
    for lo in range(0, n, _ROW_BLOCK):
        yield lo, min(lo + _ROW_BLOCK, n)


def objective(X, stats: CooccurrenceStats, k: int) -> float:
    """SGNS log-likelihood ``F(X)`` summed over every (word, context) cell.

    Unobserved pairs still contribute through their negative term.  Cell
    values are accumulated in row-major blocks with exactly rounded
    summation, so the result does not depend on BLAS threading.

    Raises:
        ContractError: ``X`` does not have shape ``(n, m)``.
        DegenerateCorpusError: ``|D| = 0``.
    """
    X = np.asarray(X, dtype=np.float64)
    _check_shape(X, stats)
    rw, cw = negative_weights(stats, k)
    counts = stats.pair_counts
    partials = []
    for lo, hi in _row_blocks(stats.n):
        xb = X[lo:hi]
        vals = np.multiply.outer(rw[lo:hi], cw) * log_sigmoid(-xb)
        vals += counts[lo:hi].toarray() * log_sigmoid(xb)
        partials.append(math.fsum(vals.ravel().tolist()))
    return math.fsum(partials)


def gradient(X, stats: CooccurrenceStats, k: int) -> np.ndarray:
    """Euclidean gradient ``a s(-x) - b s(x)``, cell by cell, as a dense matrix."""
    X = np.asarray(X, dtype=np.float64)
    _check_shape(X, stats)
    rw, cw = negative_weights(stats, k)
    counts = stats.pair_counts
    G = np.empty_like(X)
    for lo, hi in _row_blocks(stats.n):
        xb = X[lo:hi]
        G[lo:hi] = counts[lo:hi].toarray() * sigmoid(-xb)
        G[lo:hi] -= np.multiply.outer(rw[lo:hi], cw) * sigmoid(xb)
    return G
