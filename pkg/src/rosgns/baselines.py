"""Competitor trainers: truncated SVD of the SPPMI matrix, and streaming SGD.

SPPMI is pointwise mutual information shifted down by log k and clipped at zero::

    sppmi[w, c] = max(log(#(w,c) |D| / (#(w) #(c))) - log k, 0)

evaluated on observed pairs only; every unobserved pair is 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np
import scipy.sparse as sp

from .corpus import CooccurrenceStats, Vocabulary, _read_sparse, _write_sparse
from .errors import ContractError, DegenerateCorpusError
from .manifold import LowRankFactors, from_product, retract_svd
from .sgns import SgnsConfig

SPPMI_MAGIC = "rosgns-sppmi"

# center positions per SGD chunk (bounds the pre-drawn negative buffer)
_SGD_CHUNK = 1 << 18


@dataclass(frozen=True, eq=False)
class SppmiMatrix:
    entries: sp.csr_matrix
    shift: int

    def toarray(self) -> np.ndarray:
        return self.entries.toarray()


def sppmi(stats: CooccurrenceStats, k: int) -> SppmiMatrix:
    if stats.total_pairs == 0:
        raise DegenerateCorpusError("SPPMI is undefined for empty statistics")
    if k < 1:
        raise ContractError("k must be >= 1")
    coo = stats.pair_counts.tocoo()
    wm = stats.word_marginals[coo.row].astype(np.float64)
    cm = stats.context_marginals[coo.col].astype(np.float64)
    pmi = np.log(coo.data.astype(np.float64) * stats.total_pairs / (wm * cm))
    vals = np.maximum(pmi - np.log(k), 0.0)
    out = sp.csr_matrix((vals, (coo.row, coo.col)), shape=coo.shape)
    out.eliminate_zeros()
    out.sort_indices()
    return SppmiMatrix(out, k)


def save_sppmi(matrix: SppmiMatrix, stats: CooccurrenceStats, path) -> None:
    """Dump in the co-occurrence triples layout, values written with ``repr``."""
    _write_sparse(path, SPPMI_MAGIC, stats.vocab, stats.window, matrix.entries,
                  {"shift": matrix.shift}, fmt=repr)


def load_sppmi(path) -> tuple[SppmiMatrix, Vocabulary]:
    header, vocab, _, entries = _read_sparse(path, SPPMI_MAGIC, np.float64)
    return SppmiMatrix(entries, int(header["shift"])), vocab


def svd_sppmi_factors(stats: CooccurrenceStats, d: int, k: int) -> LowRankFactors:
    """Rank-``d`` truncated SVD of the SPPMI matrix."""
    if d > min(stats.n, stats.m):
        raise ContractError(f"dimension {d} exceeds min(n, m) = {min(stats.n, stats.m)}")
    return retract_svd(sppmi(stats, k).toarray(), d)


def random_factors(shape, d: int, seed: int, frobenius: float | None = None) -> LowRankFactors:
    """Gaussian rank-``d`` point, optionally rescaled to a given Frobenius norm."""
    n, m = shape
    rng = np.random.default_rng(seed)
    W0 = rng.standard_normal((n, d))
    C0 = rng.standard_normal((m, d))
    point = from_product(W0, C0)
    if frobenius is not None:
        norm = np.linalg.norm(point.S)
        point = LowRankFactors(point.U, point.S * (frobenius / norm), point.V)
    return point


class EmbeddingPair(NamedTuple):
    W: np.ndarray
    C: np.ndarray


@numba.njit(cache=True)
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@numba.njit(cache=True)
def _sgd_pass(W, C, centers, contexts, negatives, lr):
    d = W.shape[1]
    k = negatives.shape[1]
    acc = np.empty(d)
    for p in range(centers.shape[0]):
        w = centers[p]
        acc[:] = 0.0
        for j in range(k + 1):
            if j == 0:
                c = contexts[p]
                label = 1.0
            else:
                c = negatives[p, j - 1]
                label = 0.0
            dot = 0.0
            for t in range(d):
                dot += W[w, t] * C[c, t]
            g = lr * (label - _sigmoid(dot))
            for t in range(d):
                acc[t] += g * C[c, t]
                C[c, t] += g * W[w, t]
        for t in range(d):
            W[w, t] += acc[t]


def _window_pairs(ids, lo, hi, window):
    """(center, context) index pairs for centers ``lo..hi-1``, center-major."""
    pos = np.arange(lo, hi)
    offsets = np.concatenate([np.arange(-window, 0), np.arange(1, window + 1)])
    other = pos[:, None] + offsets[None, :]
    valid = (other >= 0) & (other < len(ids))
    centers = np.broadcast_to(pos[:, None], other.shape)[valid]
    return ids[centers], ids[other[valid]]


def context_distribution(ids, m: int, window: int) -> np.ndarray:
    """``P_D(c) = #(c) / |D|`` computed directly from an encoded token stream."""
    n_tok = len(ids)
    j = np.arange(n_tok)
    partners = np.minimum(j, window) + np.minimum(n_tok - 1 - j, window)
    counts = np.bincount(ids, weights=partners, minlength=m)
    total = counts.sum()
    if total == 0:
        raise DegenerateCorpusError("no word-context pairs in corpus")
    return counts / total


def sgd_sgns_train(tokens, vocab: Vocabulary, config: SgnsConfig, epochs: int, seed: int, *,
                   window: int = 5, learning_rate: float = 0.025, init=None) -> EmbeddingPair:
    """Train SGNS word/context vectors by plain SGD over the token stream.

    For each (word, context) pair within ``window`` the positive term is
    ascended, and ``k`` negative contexts drawn from ``P_D(c) = #(c)/|D|``
    are pushed down, word2vec style: context rows are updated immediately,
    the word row once all ``k + 1`` contexts have been seen.

    Args:
        tokens: token strings, or an int array already encoded with ``vocab``.
        vocab: shared word/context vocabulary.
        config: uses ``dimension`` and ``negative_samples``.
        epochs: passes over the corpus.
        seed: seeds both the initialization and negative sampling.
        window: context half-width.
        learning_rate: constant step size.
        init: optional ``(W0, C0)``; default uniform in ``[-0.5/d, 0.5/d]``.

    Returns:
        EmbeddingPair of ``(W, C)`` float64 arrays.
    """
    if len(vocab) == 0:
        raise ContractError("vocabulary is empty")
    if epochs < 0:
        raise ContractError("epochs must be >= 0")
    n = m = len(vocab)
    d = config.dimension
    k = config.negative_samples
    rng = np.random.default_rng(seed)
    if init is None:
        bound = 0.5 / d
        W = rng.uniform(-bound, bound, size=(n, d))
        C = rng.uniform(-bound, bound, size=(m, d))
    else:
        W = np.array(init[0], dtype=np.float64)
        C = np.array(init[1], dtype=np.float64)
        if W.shape != (n, d) or C.shape != (m, d):
            raise ContractError("initial vectors do not match vocabulary size and dimension")
    if epochs == 0:
        return EmbeddingPair(W, C)
    if isinstance(tokens, np.ndarray) and tokens.dtype.kind in "iu":
        ids = tokens.astype(np.int64, copy=False)
    else:
        ids = vocab.encode(tokens)
    cdf = np.cumsum(context_distribution(ids, m, window))
    for _ in range(epochs):
        for lo in range(0, len(ids), _SGD_CHUNK):
            centers, contexts = _window_pairs(ids, lo, min(lo + _SGD_CHUNK, len(ids)), window)
            draws = rng.random((len(centers), k)) * cdf[-1]
            negatives = np.minimum(np.searchsorted(cdf, draws, side="right"), m - 1)
            _sgd_pass(W, C, centers, contexts, negatives, float(learning_rate))
    return EmbeddingPair(W, C)
