"""
Binary decision tree grown by maximizing gini purity.

Purity here is G = sum(p_i^2) (higher is purer); the conventional gini
impurity is 1 - G. A split's quality is the size-weighted purity of its two
children, ``sum(c_L^2)/n_L + sum(c_R^2)/n_R`` over class counts ``c``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any, NamedTuple

import numpy as np

from ..utils.error_handler import ContractError

logger = logging.getLogger(__name__)

MIN_GAIN = 1e-12

# Upper bound on rows x columns x classes held in memory per column block.
_BLOCK_CELLS = 4_000_000


def gini_index(class_fractions: Sequence[float] | np.ndarray) -> float:
    """Purity ``sum(p_i^2)`` of a class distribution.

    Raises:
        ContractError: fractions are negative or do not sum to 1 (within 1e-9).
    """
    p = np.asarray(class_fractions, dtype=float)
    if p.size == 0 or np.any(p < 0) or not np.isfinite(p).all() or abs(p.sum() - 1.0) > 1e-9:
        raise ContractError(f"Not a probability vector: {p.tolist()}")
    return float(np.dot(p, p))


def gini_impurity(class_fractions: Sequence[float] | np.ndarray) -> float:
    return 1.0 - gini_index(class_fractions)


def split_score(left_counts: np.ndarray, right_counts: np.ndarray) -> float:
    """Weighted child purity of one candidate split."""
    n_left = int(left_counts.sum())
    n_right = int(right_counts.sum())
    return int(np.dot(left_counts, left_counts)) / n_left + int(
        np.dot(right_counts, right_counts)
    ) / n_right


class Split(NamedTuple):
    feature: int
    threshold: float
    score: float
    gain: float


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    min_samples_leaf: int = 1,
) -> Split | None:
    """Best (feature, threshold) over all midpoints of consecutive distinct values.

    Rows with ``x <= threshold`` go left. Ties go to the lowest feature index,
    then the lowest threshold. Returns ``None`` when no split improves purity
    by more than ``MIN_GAIN``.
    """
    n, d = X.shape
    if n < 2 * min_samples_leaf or d == 0:
        return None

    onehot = np.eye(n_classes, dtype=np.int64)[y]
    totals = onehot.sum(axis=0)
    parent = int(np.dot(totals, totals)) / n

    n_left = np.arange(1, n, dtype=np.int64)[:, None]
    n_right = n - n_left
    size_ok = (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)

    best: Split | None = None
    block = max(1, _BLOCK_CELLS // max(1, n * n_classes))
    for start in range(0, d, block):
        cols = X[:, start : start + block]
        order = np.argsort(cols, axis=0, kind="stable")
        sorted_vals = np.take_along_axis(cols, order, axis=0)

        # (n, b, C) cumulative class counts of the sorted prefix
        left = np.cumsum(onehot[order], axis=0)[:-1]
        right = totals - left
        scores = (left * left).sum(axis=2) / n_left + (right * right).sum(axis=2) / n_right

        valid = (sorted_vals[:-1] < sorted_vals[1:]) & size_ok
        scores = np.where(valid, scores, -np.inf)

        positions = scores.argmax(axis=0)
        col_scores = scores[positions, np.arange(cols.shape[1])]
        col = int(col_scores.argmax())
        score = float(col_scores[col])
        if not np.isfinite(score):
            continue
        if best is None or score > best.score:
            pos = positions[col]
            threshold = (sorted_vals[pos, col] + sorted_vals[pos + 1, col]) / 2.0
            best = Split(start + col, float(threshold), score, score - parent)

    if best is None or best.gain <= MIN_GAIN:
        return None
    return best


class DecisionTree:
    """Array-backed tree; leaves hold class distributions."""

    def __init__(self, max_depth: int = 12, min_samples_leaf: int = 5):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.feature_: list[int] = []
        self.threshold_: list[float] = []
        self.left_: list[int] = []
        self.right_: list[int] = []
        self.value_: list[list[float]] = []

    @property
    def node_count(self) -> int:
        return len(self.feature_)

    def _add_node(self, counts: np.ndarray) -> int:
        self.feature_.append(-1)
        self.threshold_.append(0.0)
        self.left_.append(-1)
        self.right_.append(-1)
        self.value_.append((counts / counts.sum()).tolist())
        return len(self.feature_) - 1

    def fit(self, X: np.ndarray, y: np.ndarray, n_classes: int, rng: np.random.Generator) -> DecisionTree:
        self.feature_, self.threshold_, self.left_, self.right_, self.value_ = [], [], [], [], []
        stack = [(np.arange(X.shape[0]), 0, None, False)]
        while stack:
            rows, depth, parent, is_left = stack.pop()
            counts = np.bincount(y[rows], minlength=n_classes).astype(float)
            node = self._add_node(counts)
            if parent is not None:
                if is_left:
                    self.left_[parent] = node
                else:
                    self.right_[parent] = node

            if depth >= self.max_depth or np.count_nonzero(counts) <= 1:
                continue
            split = best_split(X[rows], y[rows], n_classes, self.min_samples_leaf)
            if split is None:
                continue
            self.feature_[node] = split.feature
            self.threshold_[node] = split.threshold
            goes_left = X[rows, split.feature] <= split.threshold
            # right pushed first so the left subtree is numbered first
            stack.append((rows[~goes_left], depth + 1, node, False))
            stack.append((rows[goes_left], depth + 1, node, True))

        logger.debug("Grew decision tree with %d nodes", self.node_count)
        return self

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        feature = np.array(self.feature_, dtype=np.int64)
        threshold = np.array(self.threshold_, dtype=float)
        left = np.array(self.left_, dtype=np.int64)
        right = np.array(self.right_, dtype=np.int64)

        nodes = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            internal = feature[nodes] >= 0
            if not internal.any():
                return nodes
            idx = rows[internal]
            current = nodes[idx]
            goes_left = X[idx, feature[current]] <= threshold[current]
            nodes[idx] = np.where(goes_left, left[current], right[current])

    def scores(self, X: np.ndarray) -> np.ndarray:
        values = np.array(self.value_, dtype=float)
        return values[self.apply(X)]

    def to_params(self) -> dict[str, Any]:
        return {
            "feature": list(self.feature_),
            "left": list(self.left_),
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "right": list(self.right_),
            "threshold": list(self.threshold_),
            "value": [list(v) for v in self.value_],
        }

    @classmethod
    def from_params(cls, params: dict[str, Any]) -> DecisionTree:
        tree = cls(int(params["max_depth"]), int(params["min_samples_leaf"]))
        tree.feature_ = [int(v) for v in params["feature"]]
        tree.threshold_ = [float(v) for v in params["threshold"]]
        tree.left_ = [int(v) for v in params["left"]]
        tree.right_ = [int(v) for v in params["right"]]
        tree.value_ = [[float(p) for p in v] for v in params["value"]]
        return tree


__all__ = [
    "MIN_GAIN",
    "gini_index",
    "gini_impurity",
    "split_score",
    "Split",
    "best_split",
    "DecisionTree",
]
