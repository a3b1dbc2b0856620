"""
Labeled feature matrices with optional fold assignments.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from ..utils.error_handler import ContractError


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature rows ``X`` with integer labels ``y`` over ``class_alphabet``.

    ``record_ids`` keep each row traceable to its ``doc_id:line`` origin.
    """

    X: np.ndarray
    y: np.ndarray
    class_alphabet: tuple[int, ...]
    fold_assignments: np.ndarray | None = None
    record_ids: tuple[str, ...] | None = None
    mode: str | None = None

    def __post_init__(self) -> None:
        if self.X.ndim != 2:
            raise ContractError(f"X must be 2-dimensional, got shape {self.X.shape}")
        if self.X.shape[0] != self.y.shape[0]:
            raise ContractError(
                f"X has {self.X.shape[0]} rows but y has {self.y.shape[0]} labels"
            )
        known = set(self.class_alphabet)
        stray = sorted({int(v) for v in np.unique(self.y)} - known)
        if stray:
            raise ContractError(f"Labels {stray} are not in class alphabet {self.class_alphabet}")
        if self.fold_assignments is not None and self.fold_assignments.shape[0] != self.y.shape[0]:
            raise ContractError("fold_assignments must have one entry per record")
        if self.record_ids is not None and len(self.record_ids) != self.y.shape[0]:
            raise ContractError("record_ids must have one entry per record")

    def __len__(self) -> int:
        return int(self.y.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])

    @property
    def n_folds(self) -> int:
        if self.fold_assignments is None or len(self) == 0:
            return 0
        return int(self.fold_assignments.max()) + 1

    def class_counts(self) -> dict[int, int]:
        counts = Counter(int(v) for v in self.y)
        return {label: counts.get(label, 0) for label in self.class_alphabet}

    def subset(self, indices: np.ndarray | list[int]) -> LabeledDataset:
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            X=self.X[idx],
            y=self.y[idx],
            class_alphabet=self.class_alphabet,
            fold_assignments=(
                self.fold_assignments[idx] if self.fold_assignments is not None else None
            ),
            record_ids=(
                tuple(self.record_ids[i] for i in idx) if self.record_ids is not None else None
            ),
            mode=self.mode,
        )

    def fold_split(self, fold: int) -> tuple[LabeledDataset, LabeledDataset]:
        """(train, test) where test is exactly the records assigned to ``fold``."""
        if self.fold_assignments is None:
            raise ContractError("Dataset has no fold assignments")
        test_mask = self.fold_assignments == fold
        return (
            self.subset(np.flatnonzero(~test_mask)),
            self.subset(np.flatnonzero(test_mask)),
        )

    def stratified_folds(self, k: int, seed: int) -> LabeledDataset:
        """Assign every record to one of ``k`` folds, class by class.

        Each class is shuffled with the seeded generator and dealt round-robin
        starting at fold 0, so per-class fold sizes differ by at most one.

        Raises:
            ContractError: ``k < 2`` or a present class has fewer than ``k`` members.
        """
        if k < 2:
            raise ContractError(f"Need at least 2 folds, got {k}")
        rng = np.random.default_rng(seed)
        folds = np.full(len(self), -1, dtype=np.int64)
        for label, count in self.class_counts().items():
            if count == 0:
                continue
            if count < k:
                raise ContractError(f"Class {label} has {count} records, fewer than k={k} folds")
            members = np.flatnonzero(self.y == label)
            shuffled = members[rng.permutation(members.size)]
            folds[shuffled] = np.arange(members.size) % k
        return self.with_folds(folds)

    def balanced(self, seed: int) -> LabeledDataset:
        """Downsample every class without replacement to the minority count.

        Classes of the alphabet with no records are ignored. Record order is kept.
        """
        counts = {label: n for label, n in self.class_counts().items() if n > 0}
        if not counts:
            return self
        target = min(counts.values())
        rng = np.random.default_rng(seed)
        keep = []
        for label in counts:
            members = np.flatnonzero(self.y == label)
            keep.append(rng.choice(members, size=target, replace=False))
        return self.subset(np.sort(np.concatenate(keep)))

    def with_folds(self, folds: np.ndarray) -> LabeledDataset:
        return replace(self, fold_assignments=np.asarray(folds, dtype=np.int64))

    def with_features(self, X: np.ndarray, mode: str | None = None) -> LabeledDataset:
        return replace(self, X=X, mode=mode if mode is not None else self.mode)


__all__ = ["LabeledDataset"]
