"""Problem definition: plants, block partitions, penalties, sparsity masks."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .errors import DefinitenessError, DimensionError

WEIGHTED_L1 = "weighted_l1"
CARDINALITY = "cardinality"
SUM_OF_LOGS = "sum_of_logs"
PENALTY_KINDS = (WEIGHTED_L1, CARDINALITY, SUM_OF_LOGS)


def _matrix(x, name):
    M = np.array(x, dtype=float, ndmin=2)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    M.setflags(write=False)
    return M


@dataclass(frozen=True)
class Plant:
    """State-space data ``dx = A x + B1 d + B2 u`` with weights ``Q``, ``R``.

    The performance output is ``z = [Q^{1/2} x; R^{1/2} u]``; square roots are
    never formed.
    """

    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        for name in ("A", "B1", "B2", "Q", "R"):
            object.__setattr__(self, name, _matrix(getattr(self, name), name))
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise DimensionError(f"A must be square, got {self.A.shape}")
        if self.B1.shape[0] != n:
            raise DimensionError(f"B1 must have {n} rows, got {self.B1.shape}")
        if self.B2.shape[0] != n:
            raise DimensionError(f"B2 must have {n} rows, got {self.B2.shape}")
        m = self.B2.shape[1]
        if self.Q.shape != (n, n):
            raise DimensionError(f"Q must be {n}x{n}, got {self.Q.shape}")
        if self.R.shape != (m, m):
            raise DimensionError(f"R must be {m}x{m}, got {self.R.shape}")
        for name, M in (("Q", self.Q), ("R", self.R)):
            scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
            if np.max(np.abs(M - M.T), initial=0.0) > 1e-10 * scale:
                raise DefinitenessError(f"{name} is not symmetric")
        if n and np.linalg.eigvalsh(self.Q).min() < -1e-10 * max(1.0, np.abs(self.Q).max()):
            raise DefinitenessError("Q is not positive semidefinite")
        if m and np.linalg.eigvalsh(self.R).min() <= 1e-10 * max(1.0, np.abs(self.R).max()):
            raise DefinitenessError("R is not positive definite")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B2.shape[1]

    @property
    def d(self) -> int:
        return self.B1.shape[1]

    @property
    def gain_shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def closed_loop(self, F) -> np.ndarray:
        return self.A - self.B2 @ F

    def permuted(self, perm) -> "Plant":
        """Reorder the states by ``perm``."""
        p = np.asarray(perm)
        return Plant(self.A[np.ix_(p, p)], self.B1[p], self.B2[p],
                     self.Q[np.ix_(p, p)], self.R)


@dataclass(frozen=True)
class BlockPartition:
    """Row/column block sizes of an ``m x n`` gain."""

    row_sizes: tuple[int, ...]
    col_sizes: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(s) for s in self.row_sizes)
        cols = tuple(int(s) for s in self.col_sizes)
        if not rows or not cols or min(rows) < 1 or min(cols) < 1:
            raise DimensionError("block sizes must be positive")
        object.__setattr__(self, "row_sizes", rows)
        object.__setattr__(self, "col_sizes", cols)

    @classmethod
    def uniform(cls, m, n, rb, cb) -> "BlockPartition":
        if m % rb or n % cb:
            raise DimensionError(f"{m}x{n} is not divisible into {rb}x{cb} blocks")
        return cls((rb,) * (m // rb), (cb,) * (n // cb))

    @property
    def shape(self) -> tuple[int, int]:
        return (sum(self.row_sizes), sum(self.col_sizes))

    @property
    def grid_shape(self) -> tuple[int, int]:
        return (len(self.row_sizes), len(self.col_sizes))

    def check(self, shape):
        if tuple(shape) != self.shape:
            raise DimensionError(f"partition covers {self.shape}, matrix is {tuple(shape)}")

    def row_index(self) -> np.ndarray:
        """Block-row label of each matrix row."""
        return np.repeat(np.arange(len(self.row_sizes)), self.row_sizes)

    def col_index(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.col_sizes)), self.col_sizes)

    def block_norms(self, F) -> np.ndarray:
        """Frobenius norm of every block, shape ``grid_shape``."""
        F = np.asarray(F, dtype=float)
        self.check(F.shape)
        sq = F * F
        rstart = np.concatenate(([0], np.cumsum(self.row_sizes)[:-1]))
        cstart = np.concatenate(([0], np.cumsum(self.col_sizes)[:-1]))
        s = np.add.reduceat(np.add.reduceat(sq, rstart, axis=0), cstart, axis=1)
        return np.sqrt(s)

    def expand(self, B) -> np.ndarray:
        """Broadcast a per-block array to the full matrix shape."""
        B = np.asarray(B)
        return B[np.ix_(self.row_index(), self.col_index())]


@dataclass(frozen=True)
class PenaltySpec:
    """Sparsity-promoting penalty.

    ``partition=None`` means elementwise. ``weights`` has the gain shape
    (elementwise) or the block-grid shape (blockwise); ``None`` means unit
    weights. Weights are ignored by the cardinality penalty.
    """

    kind: str = WEIGHTED_L1
    partition: Optional[BlockPartition] = None
    weights: Optional[np.ndarray] = field(default=None, compare=False)
    epsilon_log: float = 0.1
    epsilon_reweight: float = 1e-3

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if not self.epsilon_log > 0 or not self.epsilon_reweight > 0:
            raise ValueError("epsilon_log and epsilon_reweight must be positive")
        if self.weights is not None:
            W = np.array(self.weights, dtype=float, ndmin=2)
            if np.any(W < 0) or not np.all(np.isfinite(W)):
                raise ValueError("weights must be finite and nonnegative")
            W.setflags(write=False)
            object.__setattr__(self, "weights", W)

    @property
    def blockwise(self) -> bool:
        return self.partition is not None

    def weight_array(self, shape) -> np.ndarray:
        """Weights on the unit the penalty acts on (entries or blocks)."""
        if self.partition is not None:
            self.partition.check(shape)
            shape = self.partition.grid_shape
        if self.weights is None:
            return np.ones(shape)
        if self.weights.shape != tuple(shape):
            raise DimensionError(
                f"weights have shape {self.weights.shape}, expected {tuple(shape)}"
            )
        return self.weights

    def with_weights(self, W) -> "PenaltySpec":
        return replace(self, weights=W)


def magnitudes(F, partition=None) -> np.ndarray:
    """``|F_ij|`` elementwise, or per-block Frobenius norms."""
    F = np.asarray(F, dtype=float)
    if partition is None:
        return np.abs(F)
    return partition.block_norms(F)


def penalty_value(F, spec: PenaltySpec) -> float:
    F = np.asarray(F, dtype=float)
    mag = magnitudes(F, spec.partition)
    W = spec.weight_array(F.shape)
    if spec.kind == WEIGHTED_L1:
        return float(np.sum(W * mag))
    if spec.kind == CARDINALITY:
        return float(np.count_nonzero(mag))
    return float(np.sum(W * np.log1p(mag / spec.epsilon_log)))


def default_zero_tol(F) -> float:
    F = np.asarray(F)
    return 1e-8 * max(1.0, float(np.max(np.abs(F), initial=0.0)))


class CardinalityReport(NamedTuple):
    nnz: int
    nnz_blocks: int
    mask: np.ndarray
    zero_tol: float


def cardinality_report(F, partition: BlockPartition | None = None,
                       zero_tol: float | None = None) -> CardinalityReport:
    """Count nonzero entries and blocks of ``F``.

    An entry is nonzero iff ``|F_ij| > zero_tol``; a block iff its Frobenius
    norm exceeds ``zero_tol``. Without a partition every entry is a block.
    """
    F = np.asarray(F, dtype=float)
    if zero_tol is None:
        zero_tol = default_zero_tol(F)
    mask = np.abs(F) > zero_tol
    nnz = int(np.count_nonzero(mask))
    if partition is None:
        nnz_blocks = nnz
    else:
        nnz_blocks = int(np.count_nonzero(partition.block_norms(F) > zero_tol))
    return CardinalityReport(nnz, nnz_blocks, mask, float(zero_tol))
