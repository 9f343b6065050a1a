"""Tokenization, vocabulary construction and word-context co-occurrence counting.

The counting follows the plain skip-gram convention: after out-of-vocabulary
tokens are dropped, every token is paired with each of the ``window`` tokens on
either side of it.  No subsampling and no dynamic window shrinking is applied.
"""

from __future__ import annotations

import io
import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ContractError, FormatError

STATS_MAGIC = "rosgns-cooc"
STATS_VERSION = 1

_NON_ALNUM = re.compile(r"[\W_]+")

# positions processed per counting shard; bounds peak memory on large corpora
_SHARD = 1 << 22


def tokenize(text: str | bytes) -> list[str]:
    """Lowercase, turn every non-alphanumeric character into a space, split.

    Bytes are decoded as UTF-8 with invalid sequences replaced.

    >>> tokenize("The cat, the cat.")
    ['the', 'cat', 'the', 'cat']
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    return _NON_ALNUM.sub(" ", text.lower()).split()


def iter_tokens(stream: Iterable[str | bytes]) -> Iterator[str]:
    # line-wise; the rule never joins tokens across a newline
    for line in stream:
        yield from tokenize(line)


def read_tokens(source) -> list[str]:
    """Tokenize a text file path, an open binary/text stream, or ``"-"`` for stdin."""
    if source == "-":
        return list(iter_tokens(sys.stdin.buffer))
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return list(iter_tokens(source))
    try:
        with open(source, "rb") as fh:
            return list(iter_tokens(fh))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read corpus {source}: {exc.strerror}") from exc


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """Dense token <-> index mapping with corpus frequencies.

    Every stored count is strictly greater than ``min_count``.
    """

    tokens: tuple[str, ...]
    counts: np.ndarray
    min_count: int = 0
    index_of: dict = field(init=False, repr=False)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        counts = np.asarray(self.counts, dtype=np.int64).copy()
        counts.flags.writeable = False
        if counts.shape != (len(tokens),):
            raise ContractError("counts must have one entry per token")
        index = {t: i for i, t in enumerate(tokens)}
        if len(index) != len(tokens):
            raise ContractError("vocabulary tokens must be distinct")
        if len(counts) and counts.min() <= self.min_count:
            raise ContractError(f"all counts must exceed min_count={self.min_count}")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "index_of", index)

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index_of

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (
            self.tokens == other.tokens
            and self.min_count == other.min_count
            and np.array_equal(self.counts, other.counts)
        )

    __hash__ = None

    def count_of(self, token: str) -> int:
        return int(self.counts[self.index_of[token]])

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        """Map tokens to indices, silently dropping out-of-vocabulary ones."""
        index = self.index_of
        return np.fromiter((index[t] for t in tokens if t in index), dtype=np.int64)


def build_vocabulary(tokens: Iterable[str], min_count: int) -> Vocabulary:
    """Keep tokens occurring strictly more than ``min_count`` times.

    Indices are assigned by descending frequency, ties broken lexicographically,
    so the mapping is reproducible.
    """
    if min_count < 1:
        raise ContractError("min_count must be >= 1")
    freq = Counter(tokens)
    kept = sorted((t for t, c in freq.items() if c > min_count), key=lambda t: (-freq[t], t))
    return Vocabulary(tuple(kept), np.array([freq[t] for t in kept], dtype=np.int64), min_count)


@dataclass(frozen=True, eq=False)
class CooccurrenceStats:
    """Sparse word-context counts ``#(w,c)`` plus marginals and ``|D|``.

    ``pair_counts`` is an ``n x m`` CSR matrix of int64 with no stored zeros.
    Words and contexts share one vocabulary, so ``n == m``.
    """

    vocab: Vocabulary
    pair_counts: sp.csr_matrix
    window: int
    word_marginals: np.ndarray = field(init=False)
    context_marginals: np.ndarray = field(init=False)
    total_pairs: int = field(init=False)

    def __post_init__(self):
        if self.window < 1:
            raise ContractError("window must be >= 1")
        n = len(self.vocab)
        counts = sp.csr_matrix(self.pair_counts, dtype=np.int64, copy=True)
        if counts.shape != (n, n):
            raise ContractError(f"pair_counts shape {counts.shape} does not match vocabulary size {n}")
        counts.sum_duplicates()
        counts.eliminate_zeros()
        counts.sort_indices()
        if counts.nnz and counts.data.min() < 0:
            raise ContractError("pair counts must be non-negative")
        wm = np.asarray(counts.sum(axis=1), dtype=np.int64).ravel()
        cm = np.asarray(counts.sum(axis=0), dtype=np.int64).ravel()
        for arr in (counts.data, wm, cm):
            arr.flags.writeable = False
        object.__setattr__(self, "pair_counts", counts)
        object.__setattr__(self, "word_marginals", wm)
        object.__setattr__(self, "context_marginals", cm)
        object.__setattr__(self, "total_pairs", int(wm.sum()))

    @property
    def n(self) -> int:
        return self.pair_counts.shape[0]

    @property
    def m(self) -> int:
        return self.pair_counts.shape[1]

    @property
    def nnz(self) -> int:
        return self.pair_counts.nnz

    def dense_counts(self, dtype=np.float64) -> np.ndarray:
        return self.pair_counts.toarray().astype(dtype, copy=False)

    def __eq__(self, other):
        if not isinstance(other, CooccurrenceStats):
            return NotImplemented
        a, b = self.pair_counts, other.pair_counts
        return (
            self.vocab == other.vocab
            and self.window == other.window
            and a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    __hash__ = None


def count_cooccurrences(tokens: Sequence[str] | np.ndarray, vocab: Vocabulary, window: int) -> CooccurrenceStats:
    """Count symmetric-window word-context pairs.

    ``tokens`` may be token strings or an already-encoded int array.  OOV tokens
    are removed before windowing, so windows close over the gaps.
    """
    if window < 1:
        raise ContractError("window must be >= 1")
    if len(vocab) == 0:
        raise ContractError("vocabulary is empty")
    if isinstance(tokens, np.ndarray) and tokens.dtype.kind in "iu":
        ids = tokens.astype(np.int64, copy=False)
    else:
        ids = vocab.encode(tokens)
    n = len(vocab)
    total = sp.csr_matrix((n, n), dtype=np.int64)
    length = len(ids)
    for start in range(0, max(length, 1), _SHARD):
        stop = min(start + _SHARD, length)
        rows, cols = [], []
        for off in range(1, window + 1):
            hi = min(stop, length - off)
            if hi <= start:
                continue
            left = ids[start:hi]
            right = ids[start + off:hi + off]
            rows += [left, right]
            cols += [right, left]
        if not rows:
            continue
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        shard = sp.coo_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(n, n)).tocsr()
        total = total + shard
    return CooccurrenceStats(vocab, total, window)


def save_stats(stats: CooccurrenceStats, path) -> None:
    """Write stats as tab-separated text.

    Layout::

        rosgns-cooc<TAB>1
        n=<n><TAB>m=<m><TAB>window=<L><TAB>min_count=<mc><TAB>total_pairs=<|D|><TAB>nnz=<nnz>
        <token><TAB><count>          # n lines, index order
        <w><TAB><c><TAB><count>      # nnz lines, row-major
    """
    _write_sparse(path, STATS_MAGIC, stats.vocab, stats.window, stats.pair_counts,
                  {"total_pairs": stats.total_pairs}, fmt=str)


def load_stats(path) -> CooccurrenceStats:
    header, vocab, window, matrix = _read_sparse(path, STATS_MAGIC, np.int64)
    stats = CooccurrenceStats(vocab, matrix, window)
    if stats.total_pairs != int(header["total_pairs"]):
        raise FormatError("total_pairs in header does not match the triples", source=path)
    return stats


def _write_sparse(path, magic, vocab, window, matrix, extra, fmt):
    coo = sp.csr_matrix(matrix).tocoo()
    n, m = coo.shape
    head = {"n": n, "m": m, "window": window, "min_count": vocab.min_count, **extra, "nnz": coo.nnz}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{magic}\t{STATS_VERSION}\n")
        fh.write("\t".join(f"{k}={v}" for k, v in head.items()) + "\n")
        for tok, cnt in zip(vocab.tokens, vocab.counts):
            fh.write(f"{tok}\t{int(cnt)}\n")
        for r, c, v in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
            fh.write(f"{r}\t{c}\t{fmt(v)}\n")


def _read_sparse(path, magic, dtype):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].split("\t")[0] != magic:
        raise FormatError(f"not a {magic} file", line=1, source=path)
    try:
        version = int(lines[0].split("\t")[1])
    except (IndexError, ValueError):
        raise FormatError("bad magic line", line=1, source=path) from None
    if version != STATS_VERSION:
        raise FormatError(f"unsupported format version {version}", line=1, source=path)
    try:
        header = dict(kv.split("=", 1) for kv in lines[1].split("\t"))
        n, m, nnz = int(header["n"]), int(header["m"]), int(header["nnz"])
        window, min_count = int(header["window"]), int(header["min_count"])
    except (IndexError, KeyError, ValueError):
        raise FormatError("malformed header", line=2, source=path) from None
    if n != m:
        raise FormatError("separate word and context vocabularies are not supported", line=2, source=path)
    if len(lines) != 2 + n + nnz:
        raise FormatError(f"expected {2 + n + nnz} lines, found {len(lines)}", source=path)
    tokens, counts = [], []
    for i in range(n):
        parts = lines[2 + i].split("\t")
        if len(parts) != 2:
            raise FormatError("expected '<token>\\t<count>'", line=3 + i, source=path)
        tokens.append(parts[0])
        try:
            counts.append(int(parts[1]))
        except ValueError:
            raise FormatError("bad count", line=3 + i, source=path) from None
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=dtype)
    conv = int if np.dtype(dtype).kind in "iu" else float
    for j in range(nnz):
        lineno = 3 + n + j
        parts = lines[lineno - 1].split("\t")
        try:
            r, c, v = int(parts[0]), int(parts[1]), conv(parts[2])
        except (IndexError, ValueError):
            raise FormatError("expected '<w>\\t<c>\\t<value>'", line=lineno, source=path) from None
        if len(parts) != 3 or not (0 <= r < n and 0 <= c < m):
            raise FormatError("triple out of range", line=lineno, source=path)
        rows[j], cols[j], vals[j] = r, c, v
    vocab = Vocabulary(tuple(tokens), np.array(counts, dtype=np.int64), min_count)
    matrix = sp.coo_matrix((vals, (rows, cols)), shape=(n, m)).tocsr()
    return header, vocab, window, matrix
