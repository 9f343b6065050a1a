"""Word vectors recovered from a low-rank point, cosine neighbours, text I/O."""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field

import numpy as np

from .corpus import Vocabulary
from .errors import ContractError, FormatError, TokenNotFoundError
from .manifold import LowRankFactors

SCALINGS = ("sqrt", "full", "none")


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Row ``i`` of ``vectors`` is the embedding of ``tokens[i]``."""

    tokens: tuple[str, ...]
    vectors: np.ndarray
    provenance: dict = field(default_factory=dict)
    index_of: dict = field(init=False, repr=False)

    def __post_init__(self):
        tokens = tuple(self.tokens.tokens if isinstance(self.tokens, Vocabulary) else self.tokens)
        vectors = np.array(self.vectors, dtype=np.float64)
        if vectors.ndim == 1 and vectors.size == 0:
            vectors = vectors.reshape(0, 0)
        if vectors.ndim != 2 or vectors.shape[0] != len(tokens):
            raise ContractError(f"{len(tokens)} tokens but vectors have shape {vectors.shape}")
        if not np.all(np.isfinite(vectors)):
            raise ContractError("embedding vectors must be finite")
        vectors.flags.writeable = False
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "index_of", {t: i for i, t in enumerate(tokens)})

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index_of

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def vector(self, token: str) -> np.ndarray:
        try:
            return self.vectors[self.index_of[token]]
        except KeyError:
            raise TokenNotFoundError(token, difflib.get_close_matches(token, self.tokens, n=5)) from None


def extract_embeddings(factors: LowRankFactors, scaling: str = "sqrt") -> tuple[np.ndarray, np.ndarray]:
    """Split ``X = U S V^T`` into word vectors ``W`` and context vectors ``C``.

    The SVD ``X = U' diag(s) V'^T`` is obtained from an SVD of the small core
    ``S`` only.  Scaling:

    * ``"sqrt"``: ``W = U' sqrt(s)``, ``C = V' sqrt(s)``, so ``W C^T = X``;
    * ``"full"``: ``W = U' s``, ``C = V'``, so ``W W^T = X X^T``;
    * ``"none"``: ``W = U'``, ``C = V' s``.

    Each column of ``U'`` is sign-flipped so that its largest-magnitude entry
    is non-negative (``V'`` follows), which makes outputs reproducible.
    """
    if scaling not in SCALINGS:
        raise ContractError(f"scaling must be one of {SCALINGS}")
    P, s, Qt = np.linalg.svd(factors.S)
    Uw = factors.U @ P
    Vc = factors.V @ Qt.T
    if Uw.shape[0]:
        pivot = Uw[np.argmax(np.abs(Uw), axis=0), np.arange(Uw.shape[1])]
        signs = np.where(pivot < 0, -1.0, 1.0)
        Uw *= signs
        Vc *= signs
    if scaling == "sqrt":
        r = np.sqrt(s)
        return Uw * r, Vc * r
    if scaling == "full":
        return Uw * s, Vc
    return Uw, Vc * s


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def _unit_rows(M):
    norms = np.linalg.norm(M, axis=1, keepdims=True)
    return np.divide(M, norms, out=np.zeros_like(M), where=norms > 0)


def nearest_neighbors(emb: EmbeddingSet, query: str, count: int = 10, offset: int = 0) -> list[tuple[str, float]]:
    """Other tokens by descending cosine to ``query`` (ties by index), ``[offset, offset+count)``.

    The query itself is excluded.
    """
    if count < 1 or offset < 0:
        raise ContractError("count must be >= 1 and offset >= 0")
    q = emb.vector(query)
    qi = emb.index_of[query]
    nq = np.linalg.norm(q)
    sims = _unit_rows(emb.vectors) @ (q / nq) if nq > 0 else np.zeros(len(emb))
    sims = np.clip(sims, -1.0, 1.0)
    idx = np.arange(len(emb))
    keep = idx != qi
    idx, vals = idx[keep], sims[keep]
    order = np.lexsort((idx, -vals))[offset:offset + count]
    return [(emb.tokens[i], float(vals[j])) for j, i in zip(order, idx[order])]


def save_embeddings(emb: EmbeddingSet, path) -> None:
    """Text format: ``"n d"`` header, then ``token v1 ... vd`` per line in index order."""
    n = len(emb)
    d = emb.vectors.shape[1] if n else 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{n} {d}\n")
        for tok, row in zip(emb.tokens, emb.vectors):
            fh.write(tok + " " + " ".join(format(v, ".17g") for v in row.tolist()) + "\n")


def load_embeddings(path) -> EmbeddingSet:
    """Read the ``"n d"`` text format.  Lines starting with ``#`` are ignored."""
    tokens, rows = [], []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if line.startswith("#") or (not line.strip() and header is None):
                continue
            parts = line.split(" ")
            if header is None:
                try:
                    header = tuple(int(p) for p in parts)
                    n, d = header
                except ValueError:
                    raise FormatError("header must be '<n> <d>'", line=lineno, source=path) from None
                continue
            if len(parts) != d + 1:
                raise FormatError(f"row for {parts[0]!r} has {len(parts) - 1} values, expected {d}",
                                  line=lineno, source=path)
            try:
                rows.append([float(p) for p in parts[1:]])
            except ValueError:
                raise FormatError(f"non-numeric value in row for {parts[0]!r}", line=lineno, source=path) from None
            tokens.append(parts[0])
    if header is None:
        raise FormatError("missing header", source=path)
    if len(tokens) != n:
        raise FormatError(f"header announces {n} rows, found {len(tokens)}", source=path)
    vectors = np.array(rows, dtype=np.float64).reshape(n, d)
    return EmbeddingSet(tuple(tokens), vectors, {"source": str(path)})
