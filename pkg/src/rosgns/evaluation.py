"""Word-similarity benchmarks scored by Spearman rank correlation."""

from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .embeddings import EmbeddingSet, cosine_similarity
from .errors import FormatError, UndefinedCorrelationError

logger = logging.getLogger(__name__)

_SPLIT = re.compile(r"[,\t ]+")


@dataclass(frozen=True)
class SimilarityDataset:
    name: str
    pairs: tuple[tuple[str, str, float], ...]

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    spearman: float | None
    pairs_used: int
    pairs_total: int

    @property
    def defined(self) -> bool:
        return self.spearman is not None

    def cell(self) -> str:
        if self.spearman is None:
            return f"n/a ({self.pairs_used}/{self.pairs_total} pairs)"
        return f"{self.spearman:.3f}"


def _parse_score(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def load_dataset(path, name: str | None = None) -> SimilarityDataset:
    """Parse ``word1 word2 score`` lines separated by tabs, commas or spaces.

    A first line whose score column is not numeric is treated as a header.
    Tokens are lowercased.  Repeated unordered pairs keep their first score.
    """
    if name is None:
        name = re.sub(r"\.[^.]*$", "", str(path).replace("\\", "/").rsplit("/", 1)[-1])
    pairs = []
    seen = set()
    first = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = _SPLIT.split(line)
            is_first, first = first, False
            try:
                if len(parts) < 3:
                    raise ValueError(line)
                score = _parse_score(parts[2])
            except ValueError:
                if is_first:
                    continue
                raise FormatError("expected 'word1 word2 score'", line=lineno, source=path) from None
            a, b = parts[0].lower(), parts[1].lower()
            key = frozenset((a, b)) if a != b else (a,)
            if key in seen:
                logger.warning("%s:%d: duplicate pair (%s, %s) ignored", path, lineno, a, b)
                continue
            seen.add(key)
            pairs.append((a, b, score))
    if not pairs:
        raise FormatError("dataset contains no pairs", source=path)
    return SimilarityDataset(name, tuple(pairs))


def spearman(xs, ys) -> float:
    """Pearson correlation of average ranks (ties share their mean rank)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("inputs must be 1-D and of equal length")
    if len(xs) < 2:
        raise UndefinedCorrelationError("need at least 2 points")
    # doubled, centred average ranks are integers, so the moments are exact
    n = len(xs)
    rx = [int(v) for v in 2 * rankdata(xs) - (n + 1)]
    ry = [int(v) for v in 2 * rankdata(ys) - (n + 1)]
    vx = sum(a * a for a in rx)
    vy = sum(b * b for b in ry)
    if vx == 0 or vy == 0:
        raise UndefinedCorrelationError("ranks of one input are constant")
    cov = sum(a * b for a, b in zip(rx, ry))
    if cov * cov == vx * vy:
        return 1.0 if cov > 0 else -1.0
    return float(np.clip(cov / (math.sqrt(vx) * math.sqrt(vy)), -1.0, 1.0))


def evaluate(emb: EmbeddingSet, dataset: SimilarityDataset) -> EvalReport:
    """Spearman between cosines and human scores over in-vocabulary pairs.

    Raises:
        UndefinedCorrelationError: fewer than two usable pairs, or constant
            ranks; the exception carries the OOV accounting.
    """
    human, predicted = [], []
    for a, b, score in dataset.pairs:
        if a in emb and b in emb:
            human.append(score)
            predicted.append(cosine_similarity(emb.vector(a), emb.vector(b)))
    used, total = len(human), len(dataset)
    try:
        rho = spearman(predicted, human)
    except UndefinedCorrelationError as exc:
        raise UndefinedCorrelationError(f"{dataset.name}: {exc} ({used}/{total} pairs in vocabulary)",
                                        pairs_used=used, pairs_total=total) from None
    return EvalReport(dataset.name, rho, used, total)


def evaluate_or_na(emb: EmbeddingSet, dataset: SimilarityDataset) -> EvalReport:
    try:
        return evaluate(emb, dataset)
    except UndefinedCorrelationError as exc:
        return EvalReport(dataset.name, None, exc.pairs_used, exc.pairs_total)


def reports_to_csv(rows: dict[str, list[EvalReport]]) -> str:
    """Long-form CSV: ``method,dataset,spearman,pairs_used,pairs_total``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "dataset", "spearman", "pairs_used", "pairs_total"])
    for method, reports in rows.items():
        for r in reports:
            writer.writerow([method, r.dataset, "" if r.spearman is None else repr(r.spearman),
                             r.pairs_used, r.pairs_total])
    return buf.getvalue()


def format_table(rows: dict[str, list[EvalReport]]) -> str:
    """Aligned text table, one row per method and one column per dataset."""
    datasets = []
    for reports in rows.values():
        for r in reports:
            if r.dataset not in datasets:
                datasets.append(r.dataset)
    header = ["method"] + datasets
    body = []
    for method, reports in rows.items():
        by_name = {r.dataset: r.cell() for r in reports}
        body.append([method] + [by_name.get(name, "") for name in datasets])
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = []
    for row in [header] + body:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
