"""
Trained classifier wrapper: training, prediction and the model file format.

Model files are ``DSMODEL\\0`` + 1-byte format version + 8-byte big-endian
body length + a sorted-keys JSON body.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Protocol

import numpy as np

from ..models.dataset import LabeledDataset
from ..utils.error_handler import ContractError, ModelFormatError, UsageError
from ..utils.serialization_utils import read_container, write_container
from .decision_tree import DecisionTree
from .linear_svm import LinearSVM
from .naive_bayes import MultinomialNaiveBayes

logger = logging.getLogger(__name__)

MODEL_MAGIC = b"DSMODEL\x00"
MODEL_FORMAT_VERSION = 1

KINDS = ("naive_bayes", "decision_tree", "linear_svm")
KIND_ALIASES = {"nb": "naive_bayes", "dt": "decision_tree", "svm": "linear_svm"}

DEFAULT_HYPERPARAMS: dict[str, dict[str, Any]] = {
    "naive_bayes": {"alpha": 1.0},
    "decision_tree": {"max_depth": 12, "min_samples_leaf": 5},
    "linear_svm": {"C": 1.0, "epochs": 50},
}


class Estimator(Protocol):
    def fit(self, X: np.ndarray, y: np.ndarray, n_classes: int, rng: np.random.Generator) -> Estimator: ...

    def scores(self, X: np.ndarray) -> np.ndarray: ...

    def to_params(self) -> dict[str, Any]: ...


_ESTIMATORS = {
    "naive_bayes": MultinomialNaiveBayes,
    "decision_tree": DecisionTree,
    "linear_svm": LinearSVM,
}


def resolve_kind(kind: str) -> str:
    """Accept full kind names and the short CLI names (nb, dt, svm)."""
    resolved = KIND_ALIASES.get(kind, kind)
    if resolved not in KINDS:
        raise ContractError(f"Unknown classifier kind {kind!r}; expected one of {KINDS}")
    return resolved


@dataclass(frozen=True, eq=False)
class Model:
    """An immutable trained classifier over ``class_alphabet``."""

    kind: str
    class_alphabet: tuple[int, ...]
    feature_dimension: int
    estimator: Estimator
    hyperparams: dict[str, Any] = field(default_factory=dict)
    mode: str | None = None

    def scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.feature_dimension:
            raise ContractError(
                f"Model expects {self.feature_dimension} features, got {X.shape[1]}"
            )
        return self.estimator.scores(X)


def train(
    kind: str,
    ds: LabeledDataset,
    hyperparams: dict[str, Any] | None = None,
    seed: int = 0,
) -> Model:
    """Fit a classifier; deterministic given (record order, seed).

    Raises:
        ContractError: empty dataset, fewer than two classes present, a
            non-finite feature value, or negative features for Naive Bayes.
    """
    kind = resolve_kind(kind)
    if len(ds) == 0:
        raise ContractError("Cannot train on an empty dataset")

    bad_rows = np.flatnonzero(~np.isfinite(ds.X).all(axis=1))
    if bad_rows.size:
        row = int(bad_rows[0])
        origin = ds.record_ids[row] if ds.record_ids is not None else f"record {row}"
        raise ContractError(f"Non-finite feature value in {origin}")

    alphabet = tuple(ds.class_alphabet)
    present = {int(v) for v in np.unique(ds.y)}
    if len(present) < 2:
        raise ContractError(f"Training needs at least two classes, found {sorted(present)}")

    if kind == "naive_bayes" and (ds.X < 0).any():
        raise ContractError("Naive Bayes requires non-negative feature values")

    params = {**DEFAULT_HYPERPARAMS[kind], **(hyperparams or {})}
    index = {label: i for i, label in enumerate(alphabet)}
    y_idx = np.array([index[int(v)] for v in ds.y], dtype=np.int64)

    estimator = _ESTIMATORS[kind](**params)
    estimator.fit(ds.X, y_idx, len(alphabet), np.random.default_rng(seed))
    logger.info(
        "Trained %s on %d records, %d features, classes %s",
        kind,
        len(ds),
        ds.n_features,
        alphabet,
    )
    return Model(
        kind=kind,
        class_alphabet=alphabet,
        feature_dimension=ds.n_features,
        estimator=estimator,
        hyperparams=params,
        mode=ds.mode,
    )


def predict(m: Model, x: np.ndarray) -> tuple[int, np.ndarray]:
    """Label and per-class scores for one vector; ties go to the lower class index."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ContractError(f"predict expects a single vector, got shape {x.shape}")
    scores = m.scores(x)[0]
    return m.class_alphabet[int(np.argmax(scores))], scores


def predict_batch(m: Model, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Labels and score rows for a matrix of vectors."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, len(m.class_alphabet)))
    scores = m.scores(X)
    alphabet = np.array(m.class_alphabet, dtype=np.int64)
    return alphabet[np.argmax(scores, axis=1)], scores


def model_to_dict(m: Model) -> dict[str, Any]:
    """JSON-ready body of a model; embedded as-is by composite model files."""
    return {
        "class_alphabet": list(m.class_alphabet),
        "feature_dimension": m.feature_dimension,
        "hyperparams": m.hyperparams,
        "kind": m.kind,
        "mode": m.mode,
        "params": m.estimator.to_params(),
    }


def model_from_dict(body: dict[str, Any]) -> Model:
    try:
        kind = resolve_kind(body["kind"])
        return Model(
            kind=kind,
            class_alphabet=tuple(int(c) for c in body["class_alphabet"]),
            feature_dimension=int(body["feature_dimension"]),
            estimator=_ESTIMATORS[kind].from_params(body["params"]),
            hyperparams=dict(body.get("hyperparams") or {}),
            mode=body.get("mode"),
        )
    except (KeyError, IndexError, TypeError, ValueError, ContractError) as e:
        raise ModelFormatError(f"Model body is incomplete or invalid: {e!r}") from e


def save_model(m: Model, sink: IO[bytes]) -> None:
    write_container(sink, MODEL_MAGIC, MODEL_FORMAT_VERSION, model_to_dict(m))


def load_model(source: IO[bytes]) -> Model:
    """Read a model file; no partial model is returned on any failure."""
    return model_from_dict(read_container(source, MODEL_MAGIC, MODEL_FORMAT_VERSION))


def save_model_file(m: Model, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as sink:
        save_model(m, sink)


def load_model_file(path: str | Path) -> Model:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"Model file not found: {path}")
    with path.open("rb") as source:
        return load_model(source)


__all__ = [
    "MODEL_MAGIC",
    "MODEL_FORMAT_VERSION",
    "KINDS",
    "KIND_ALIASES",
    "DEFAULT_HYPERPARAMS",
    "Model",
    "resolve_kind",
    "train",
    "predict",
    "predict_batch",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
    "save_model_file",
    "load_model_file",
]
