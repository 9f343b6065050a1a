"""Rank-d matrices kept as ``U S V^T`` and the projector-splitting ascent.

A point on the manifold is stored with orthonormal ``U`` (n x d), ``V`` (m x d)
and a general ``d x d`` core ``S``.  One ascent step moves to
``A = X + step * grad`` and retracts with a single block power sweep (two thin
QR factorizations) instead of a truncated SVD of ``A``.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import sgns
from .corpus import CooccurrenceStats
from .errors import ContractError, DegenerateCorpusError, FormatError, NumericalAbort

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


class RankDeficiencyWarning(RuntimeWarning):
    """The core factor is (numerically) singular."""


@dataclass(frozen=True, eq=False)
class LowRankFactors:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U, S, V = (np.array(a, dtype=np.float64) for a in (self.U, self.S, self.V))
        if U.ndim != 2 or V.ndim != 2 or S.shape != (U.shape[1], V.shape[1]) or U.shape[1] != V.shape[1]:
            raise ContractError(f"inconsistent factor shapes U{U.shape} S{S.shape} V{V.shape}")
        for a in (U, S, V):
            a.flags.writeable = False
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "V", V)

    @property
    def shape(self):
        return self.U.shape[0], self.V.shape[0]

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    def to_dense(self) -> np.ndarray:
        return (self.U @ self.S) @ self.V.T

    def orthonormality_error(self) -> tuple[float, float]:
        eye = np.eye(self.rank)
        return (float(np.linalg.norm(self.U.T @ self.U - eye)),
                float(np.linalg.norm(self.V.T @ self.V - eye)))


def qr_positive(A):
    """Thin QR with the diagonal of ``R`` made non-negative."""
    Q, R = np.linalg.qr(A, mode="reduced")
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return Q * signs, R * signs[:, None]


def _singular_core(values, scale, n, m):
    tol = max(n, m) * np.finfo(np.float64).eps * scale
    return scale == 0 or np.min(values) <= tol


def from_product(W0, C0) -> LowRankFactors:
    """Factor ``W0 @ C0.T`` as ``U diag(s) V^T`` without forming the product.

    Both factors are QR-decomposed and only the small ``d x d`` core is passed
    to an SVD.  A rank-deficient product is accepted (zeros in ``S``) but a
    :class:`RankDeficiencyWarning` is issued.
    """
    W0 = np.asarray(W0, dtype=np.float64)
    C0 = np.asarray(C0, dtype=np.float64)
    if W0.ndim != 2 or C0.ndim != 2 or W0.shape[1] != C0.shape[1]:
        raise ContractError("W0 and C0 must be 2-D with the same number of columns")
    d = W0.shape[1]
    if d > min(W0.shape[0], C0.shape[0]):
        raise ContractError(f"rank {d} exceeds min(n, m)")
    if not (np.all(np.isfinite(W0)) and np.all(np.isfinite(C0))):
        raise ContractError("initial factors must be finite")
    Qw, Rw = qr_positive(W0)
    Qc, Rc = qr_positive(C0)
    P, s, Qt = np.linalg.svd(Rw @ Rc.T)
    if _singular_core(s, s[0] if len(s) else 0.0, *W0.shape):
        warnings.warn("initial product is rank deficient; the power step may stall", RankDeficiencyWarning,
                      stacklevel=2)
    return LowRankFactors(Qw @ P, np.diag(s), Qc @ Qt.T)


def retract_svd(A, d: int) -> LowRankFactors:
    """Best rank-``d`` approximation of ``A`` (truncated SVD, descending ``S``)."""
    A = np.asarray(A, dtype=np.float64)
    if d < 1 or d > min(A.shape):
        raise ContractError(f"rank {d} must lie in [1, {min(A.shape)}]")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    return LowRankFactors(U[:, :d], np.diag(s[:d]), Vt[:d].T)


def retract_step(point: LowRankFactors, grad, step: float) -> LowRankFactors:
    """Retract ``X + step * grad`` onto the rank-d manifold by one power sweep.

    With ``A = X + step * grad``::

        U1, R1 = qr(A V)
        V1, R2 = qr(A^T U1)
        X1 = U1 R2^T V1^T        (= U1 U1^T A)

    ``A`` is never formed; ``A V = U S + step * grad V`` because ``V`` has
    orthonormal columns, and likewise for ``A^T U1``.
    """
    if not step > 0:
        raise ContractError("step size must be > 0")
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != point.shape:
        raise ContractError(f"gradient shape {grad.shape} does not match point {point.shape}")
    U, S, V = point.U, point.S, point.V
    GV = grad @ V
    U1, R1 = qr_positive(U @ S + step * GV)
    V1, R2 = qr_positive(V @ (S.T @ (U.T @ U1)) + step * (grad.T @ U1))
    diag = np.abs(np.diag(R2))
    # measured against the inputs, so that cancellation inside A is caught
    scale = max(diag.max(initial=0.0), np.linalg.norm(S) + step * np.linalg.norm(GV))
    if _singular_core(diag, scale, *point.shape):
        warnings.warn("retraction produced a numerically singular core", RankDeficiencyWarning, stacklevel=2)
    return LowRankFactors(U1, R2.T, V1)


@dataclass
class TrainResult:
    factors: LowRankFactors
    trace: list = field(default_factory=list)


def train(stats: CooccurrenceStats, config: sgns.SgnsConfig, init: LowRankFactors, callback=None) -> TrainResult:
    """Riemannian ascent on the SGNS objective with a fixed step size.

    ``trace[i]`` is ``F(X_i)``; ``trace[0]`` is the objective at ``init``.  The
    optional ``callback(iteration, factors, value)`` is called after every
    evaluation, which allows external early stopping on a validation metric.

    Raises:
        DegenerateCorpusError: the statistics contain no pairs.
        NumericalAbort: the objective became NaN or infinite.
    """
    if stats.total_pairs == 0:
        raise DegenerateCorpusError("cannot train on empty co-occurrence statistics")
    if init.shape != (stats.n, stats.m):
        raise ContractError(f"initial point shape {init.shape} does not match statistics ({stats.n}, {stats.m})")
    if init.rank != config.dimension:
        raise ContractError(f"initial point has rank {init.rank}, config asks for {config.dimension}")
    k = config.negative_samples
    point = init
    X = point.to_dense()
    trace = []

    def record(i):
        value = sgns.objective(X, stats, k)
        if not np.isfinite(value):
            raise NumericalAbort(f"objective is {value} at iteration {i}", iteration=i)
        trace.append(value)
        logger.info("iteration %d: objective %.6e", i, value)
        if callback is not None:
            callback(i, point, value)

    record(0)
    for i in range(1, config.iterations + 1):
        G = sgns.gradient(X, stats, k)
        point = retract_step(point, G, config.step_size)
        X = point.to_dense()
        record(i)
    return TrainResult(point, trace)


def save_checkpoint(factors: LowRankFactors, path, iteration: int = 0) -> None:
    """Store factors as ``.npz`` with keys ``header``, ``U``, ``S``, ``V``.

    ``header`` is int64 ``[format_version, n, m, d, iteration]``; the matrices
    are float64 in C order.
    """
    n, m = factors.shape
    header = np.array([CHECKPOINT_VERSION, n, m, factors.rank, iteration], dtype=np.int64)
    with open(path, "wb") as fh:
        np.savez(fh, header=header, U=factors.U, S=factors.S, V=factors.V)


def load_checkpoint(path) -> tuple[LowRankFactors, int]:
    with np.load(path) as data:
        try:
            header = data["header"]
            U, S, V = data["U"], data["S"], data["V"]
        except KeyError as exc:
            raise FormatError(f"missing array {exc}", source=path) from None
    version, n, m, d, iteration = (int(v) for v in header)
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", source=path)
    factors = LowRankFactors(U, S, V)
    if factors.shape != (n, m) or factors.rank != d:
        raise FormatError("header does not match stored matrices", source=path)
    return factors, iteration


def write_trace(trace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "objective"])
        for i, value in enumerate(trace):
            writer.writerow([i, repr(float(value))])
