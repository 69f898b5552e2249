"""Explicit finite hypothesis classes, losses, samples and distributions.

Everything here is an explicit table: a multi-class hypothesis class is a
|H| x |X| integer matrix with entries in 1..K, a real-valued function class
is a |F| x |X| float matrix with entries in [-1, 1].  All objects are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

# Slack used when a float sits on an interval boundary.  Values produced on
# decimal grids land within ~1e-15 of the mathematical boundary; snapping by
# 1e-9 keeps the half-open interval rule deterministic across platforms.
BOUNDARY_SNAP = 1e-9


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------

def tolerant_loss(y_hat: int, y: int, tau: int) -> int:
    """Zero-one loss with tolerance: 1 iff |y - y_hat| > tau.

    tau = 0 recovers the standard zero-one loss.
    """
    if tau < 0:
        raise ValueError(f"tolerance must be >= 0, got {tau}")
    if y_hat < 1 or y < 1:
        raise ValueError(f"labels are 1-based, got ({y_hat}, {y})")
    return 1 if abs(int(y) - int(y_hat)) > tau else 0


def absolute_loss(y_hat: float, y: float) -> float:
    """Absolute loss |y_hat - y| for predictions and labels in [-1, 1]."""
    if not (-1.0 <= y_hat <= 1.0) or not (-1.0 <= y <= 1.0):
        raise ValueError(f"values must lie in [-1, 1], got ({y_hat}, {y})")
    return abs(float(y_hat) - float(y))


@dataclass(frozen=True)
class TolerantZeroOne:
    """Loss kind: zero-one with an integer tolerance."""

    tau: int = 0

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be >= 0")

    def __call__(self, y_hat, y) -> float:
        return float(tolerant_loss(int(y_hat), int(y), self.tau))


@dataclass(frozen=True)
class AbsoluteLoss:
    """Loss kind: absolute loss on [-1, 1]."""

    def __call__(self, y_hat, y) -> float:
        return absolute_loss(float(y_hat), float(y))


LossKind = Union[TolerantZeroOne, AbsoluteLoss]


# ---------------------------------------------------------------------------
# classes
# ---------------------------------------------------------------------------

def _dedup_rows(table: np.ndarray):
    """Drop duplicate rows, keeping first occurrences in order.

    Returns (deduped table, row_map) where row_map[i] is the surviving row
    index that original row i collapsed into.
    """
    seen = {}
    keep = []
    row_map = np.empty(table.shape[0], dtype=np.int64)
    for i in range(table.shape[0]):
        key = table[i].tobytes()
        if key in seen:
            row_map[i] = seen[key]
        else:
            seen[key] = len(keep)
            row_map[i] = len(keep)
            keep.append(i)
    return table[keep], row_map


class HypothesisClass:
    """Multi-class hypothesis class H in [K]^X as an explicit label table.

    Labels are 1-based; domain points are indexed 0..domain_size-1.
    Duplicate rows are collapsed at construction (`row_map` records the
    collapse).  Instances are immutable; the lazily filled dimension caches
    are append-only and safe under concurrent readers.
    """

    __slots__ = ("K", "table", "num_rows", "domain_size", "row_map",
                 "_col_masks", "_ldim_cache", "_predictor_cache")

    def __init__(self, K: int, table):
        # K = 1 only arises from degenerate discretization (gamma = 2); the
        # multi-class setting proper always has K >= 2
        if K < 1:
            raise ValueError(f"K must be >= 1, got {K}")
        arr = np.asarray(table, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("table must be a nonempty 2-D matrix")
        if arr.min() < 1 or arr.max() > K:
            raise ValueError(f"labels must lie in 1..{K}")
        arr, row_map = _dedup_rows(arr)
        arr.setflags(write=False)
        self.K = int(K)
        self.table = arr
        self.num_rows = int(arr.shape[0])
        self.domain_size = int(arr.shape[1])
        self.row_map = row_map
        self._col_masks = None       # per-column {label: row bitmask}
        self._ldim_cache = {}        # (tau, mask) -> Ldim value
        self._predictor_cache = {}   # mask -> predictor label tuple (tau=0)

    def col_masks(self):
        """Per-column map label -> bitmask of rows carrying that label."""
        if self._col_masks is None:
            masks = []
            for x in range(self.domain_size):
                col = {}
                for r in range(self.num_rows):
                    k = int(self.table[r, x])
                    col[k] = col.get(k, 0) | (1 << r)
                masks.append(col)
            self._col_masks = masks
        return self._col_masks

    @property
    def full_mask(self) -> int:
        return (1 << self.num_rows) - 1

    def row(self, i: int) -> tuple:
        return tuple(int(v) for v in self.table[i])

    def __eq__(self, other):
        return (isinstance(other, HypothesisClass) and self.K == other.K
                and np.array_equal(self.table, other.table))

    def __repr__(self):
        return (f"HypothesisClass(K={self.K}, rows={self.num_rows}, "
                f"domain={self.domain_size})")


class RealFunctionClass:
    """Real-valued function class F in [-1, 1]^X as an explicit value table."""

    __slots__ = ("table", "num_rows", "domain_size", "row_map", "grid")

    def __init__(self, table, grid: Optional[float] = None):
        arr = np.asarray(table, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("table must be a nonempty 2-D matrix")
        if arr.min() < -1.0 or arr.max() > 1.0:
            raise ValueError("values must lie in [-1, 1]")
        arr, row_map = _dedup_rows(arr)
        arr.setflags(write=False)
        self.table = arr
        self.num_rows = int(arr.shape[0])
        self.domain_size = int(arr.shape[1])
        self.row_map = row_map
        self.grid = grid

    def row(self, i: int) -> tuple:
        return tuple(float(v) for v in self.table[i])

    def __eq__(self, other):
        return (isinstance(other, RealFunctionClass)
                and np.array_equal(self.table, other.table))

    def __repr__(self):
        return (f"RealFunctionClass(rows={self.num_rows}, "
                f"domain={self.domain_size})")


# ---------------------------------------------------------------------------
# samples and distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LabeledExample:
    """One (domain index, label-or-value) pair."""

    x: int
    y: Union[int, float]


Sample = Sequence[LabeledExample]


def make_sample(pairs) -> list:
    """Build a sample from an iterable of (x, y) pairs."""
    return [LabeledExample(int(x), y) for x, y in pairs]


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Finite-support distribution over domain points with a labeling target.

    Draws are pairs (x, target[x]).  `target` may be a row of the class or
    any explicit table; realizability against a class means some hypothesis
    agrees with the target on every support point.
    """

    weights: np.ndarray
    target: np.ndarray
    _cum: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        t = np.asarray(self.target)
        if w.ndim != 1 or t.ndim != 1 or w.shape != t.shape:
            raise ValueError("weights and target must be 1-D of equal length")
        if w.min() < 0 or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "target", t)
        object.__setattr__(self, "_cum", np.cumsum(w))

    @classmethod
    def from_target_row(cls, cls_or_table, row: int, weights) -> "FiniteDistribution":
        table = getattr(cls_or_table, "table", cls_or_table)
        return cls(np.asarray(weights, dtype=np.float64),
                   np.array(table[row]))

    @classmethod
    def uniform(cls, cls_or_table, row: int) -> "FiniteDistribution":
        table = getattr(cls_or_table, "table", cls_or_table)
        n = np.asarray(table).shape[1]
        return cls.from_target_row(cls_or_table, row, np.full(n, 1.0 / n))

    @property
    def domain_size(self) -> int:
        return int(self.weights.shape[0])

    def draw_indices(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n domain indices; labels follow from the target table."""
        return np.searchsorted(self._cum, rng.random(n), side="right")

    def draw_sample(self, rng: np.random.Generator, n: int) -> list:
        idx = self.draw_indices(rng, n)
        return [LabeledExample(int(x), self.target[x].item()) for x in idx]

    def realizable_by(self, cls: HypothesisClass) -> bool:
        support = self.weights > 0
        tgt = self.target[support]
        return any(np.array_equal(cls.table[r, support], tgt)
                   for r in range(cls.num_rows))


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------

def num_intervals(gamma: float) -> int:
    """Number of length-gamma intervals partitioning [-1, 1]."""
    if gamma <= 0 or gamma > 2:
        raise ValueError(f"gamma must lie in (0, 2], got {gamma}")
    return int(np.ceil(2.0 / gamma - BOUNDARY_SNAP))


def value_to_label(v: float, gamma: float) -> int:
    """Index of the interval of [-1, 1] that v falls in.

    Interval j covers [-1 + (j-1)*gamma, -1 + j*gamma), the last interval is
    closed at +1.
    """
    K = num_intervals(gamma)
    j = int(np.floor((v + 1.0) / gamma + BOUNDARY_SNAP)) + 1
    return min(max(j, 1), K)


def label_to_midpoint(j: int, gamma: float) -> float:
    """Midpoint of interval j under the same partition."""
    K = num_intervals(gamma)
    if not (1 <= j <= K):
        raise ValueError(f"label {j} outside 1..{K}")
    if j == K:
        # last interval ends at +1 regardless of whether gamma divides 2
        lo, hi = -1.0 + (j - 1) * gamma, 1.0
        return (lo + hi) / 2.0
    return -1.0 + (j - 0.5) * gamma


def discretize(F: RealFunctionClass, gamma: float):
    """Map a real class to the multi-class of interval indices at scale gamma.

    Returns (H, row_map): H has K = ceil(2/gamma) labels and row_map[i] is
    the row of H that row i of F lands on (rows may collapse).
    """
    K = num_intervals(gamma)
    labels = np.empty_like(F.table, dtype=np.int64)
    for i in range(F.num_rows):
        for x in range(F.domain_size):
            labels[i, x] = value_to_label(float(F.table[i, x]), gamma)
    H = HypothesisClass(K, labels)
    return H, H.row_map


# ---------------------------------------------------------------------------
# loss evaluation
# ---------------------------------------------------------------------------

def evaluate_loss(h_row, data, loss: LossKind) -> float:
    """Empirical mean over a sample, or exact expectation over a distribution.

    `h_row` is a total prediction table over the domain (labels or reals).
    """
    h = np.asarray(h_row)
    if isinstance(data, FiniteDistribution):
        total = 0.0
        for x in range(data.domain_size):
            w = float(data.weights[x])
            if w > 0:
                total += w * loss(h[x], data.target[x].item())
        return total
    sample = list(data)
    if not sample:
        raise ValueError("empirical loss of an empty sample is undefined")
    return sum(loss(h[ex.x], ex.y) for ex in sample) / len(sample)
