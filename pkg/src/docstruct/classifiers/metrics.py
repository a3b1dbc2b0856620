"""
Precision / recall / F1 evaluation and stratified cross-validation.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..models.dataset import LabeledDataset
from ..utils.error_handler import ContractError
from ..utils.serialization_utils import REPORT_DECIMALS, sanitize_floats
from .model import Model, predict_batch, train

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    """Per-class metrics over ``class_alphabet`` plus macro averages.

    ``confusion[i][j]`` counts records of class ``i`` predicted as class ``j``.
    Classes never predicted have precision 0 and are listed in
    ``unpredicted_classes``.
    """

    class_alphabet: tuple[int, ...]
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    support: tuple[int, ...]
    confusion: tuple[tuple[int, ...], ...]
    accuracy: float
    unpredicted_classes: tuple[int, ...] = ()

    @property
    def macro_precision(self) -> float:
        return float(np.mean(self.precision)) if self.precision else 0.0

    @property
    def macro_recall(self) -> float:
        return float(np.mean(self.recall)) if self.recall else 0.0

    @property
    def macro_f1(self) -> float:
        return float(np.mean(self.f1)) if self.f1 else 0.0

    def to_dict(self, decimals: int | None = REPORT_DECIMALS) -> dict[str, Any]:
        per_class = {
            str(label): {
                "f1": self.f1[i],
                "precision": self.precision[i],
                "recall": self.recall[i],
                "support": self.support[i],
            }
            for i, label in enumerate(self.class_alphabet)
        }
        return sanitize_floats(
            {
                "accuracy": self.accuracy,
                "class_alphabet": list(self.class_alphabet),
                "confusion": [list(row) for row in self.confusion],
                "macro": {
                    "f1": self.macro_f1,
                    "precision": self.macro_precision,
                    "recall": self.macro_recall,
                },
                "per_class": per_class,
                "unpredicted_classes": list(self.unpredicted_classes),
            },
            decimals,
        )


def evaluate_predictions(
    y_true: Sequence[int] | np.ndarray,
    y_pred: Sequence[int] | np.ndarray,
    class_alphabet: Sequence[int],
) -> EvalReport:
    """Standard per-class metrics for already computed predictions."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ContractError("y_true and y_pred differ in length")
    if y_true.size == 0:
        raise ContractError("Cannot evaluate an empty dataset")

    alphabet = tuple(int(c) for c in class_alphabet)
    index = {label: i for i, label in enumerate(alphabet)}
    unknown = sorted({int(v) for v in np.concatenate([y_true, y_pred])} - set(alphabet))
    if unknown:
        raise ContractError(f"Labels {unknown} are not in class alphabet {alphabet}")

    k = len(alphabet)
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(
        confusion,
        (np.array([index[int(v)] for v in y_true]), np.array([index[int(v)] for v in y_pred])),
        1,
    )

    tp = np.diag(confusion).astype(float)
    predicted = confusion.sum(axis=0).astype(float)
    support = confusion.sum(axis=1)

    precision = np.divide(tp, predicted, out=np.zeros(k), where=predicted > 0)
    recall = np.divide(tp, support, out=np.zeros(k), where=support > 0)
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros(k), where=denom > 0)

    unpredicted = tuple(alphabet[i] for i in range(k) if predicted[i] == 0)
    if unpredicted:
        logger.info("Classes never predicted (precision reported as 0): %s", unpredicted)

    return EvalReport(
        class_alphabet=alphabet,
        precision=tuple(float(v) for v in precision),
        recall=tuple(float(v) for v in recall),
        f1=tuple(float(v) for v in f1),
        support=tuple(int(v) for v in support),
        confusion=tuple(tuple(int(c) for c in row) for row in confusion),
        accuracy=float(tp.sum() / y_true.size),
        unpredicted_classes=unpredicted,
    )


def evaluate(m: Model, ds: LabeledDataset) -> EvalReport:
    predictions, _ = predict_batch(m, ds.X)
    return evaluate_predictions(ds.y, predictions, ds.class_alphabet)


@dataclass(frozen=True)
class CrossValidationResult:
    kind: str
    mode: str | None
    pooled: EvalReport
    folds: list[EvalReport] = field(default_factory=list)

    @property
    def fold_macro_f1(self) -> list[float]:
        return [report.macro_f1 for report in self.folds]

    def to_dict(self, decimals: int | None = REPORT_DECIMALS) -> dict[str, Any]:
        return {
            "folds": [report.to_dict(decimals) for report in self.folds],
            "kind": self.kind,
            "mode": self.mode,
            "pooled": self.pooled.to_dict(decimals),
        }


def cross_validate(
    kind: str,
    ds: LabeledDataset,
    k: int = 5,
    seed: int = 0,
    hyperparams: dict[str, Any] | None = None,
) -> CrossValidationResult:
    """Stratified k-fold run; predictions of all held-out folds are pooled.

    Existing fold assignments are reused, otherwise seeded stratified folds
    are drawn.
    """
    if ds.fold_assignments is None:
        ds = ds.stratified_folds(k, seed)
    n_folds = ds.n_folds

    y_true: list[np.ndarray] = []
    y_pred: list[np.ndarray] = []
    reports = []
    kind_name = kind
    for fold in range(n_folds):
        train_ds, test_ds = ds.fold_split(fold)
        model = train(kind, train_ds, hyperparams, seed=seed + fold)
        kind_name = model.kind
        predictions, _ = predict_batch(model, test_ds.X)
        reports.append(evaluate_predictions(test_ds.y, predictions, ds.class_alphabet))
        y_true.append(test_ds.y)
        y_pred.append(predictions)
        logger.debug("Fold %d/%d macro-F1 %.4f", fold + 1, n_folds, reports[-1].macro_f1)

    pooled = evaluate_predictions(np.concatenate(y_true), np.concatenate(y_pred), ds.class_alphabet)
    logger.info("Cross-validated %s (%s): macro-F1 %.4f", kind_name, ds.mode, pooled.macro_f1)
    return CrossValidationResult(kind=kind_name, mode=ds.mode, pooled=pooled, folds=reports)


__all__ = [
    "EvalReport",
    "CrossValidationResult",
    "evaluate_predictions",
    "evaluate",
    "cross_validate",
]
