"""
Multinomial Naive Bayes with additive smoothing.
"""

from __future__ import annotations

from typing import Any

import numpy as np
from scipy.special import logsumexp


def _encode(values: np.ndarray) -> list:
    return [None if np.isneginf(v) else float(v) for v in values.ravel()]


def _decode(values: list, shape: tuple[int, ...]) -> np.ndarray:
    return np.array([-np.inf if v is None else v for v in values], dtype=float).reshape(shape)


class MultinomialNaiveBayes:
    """Feature values are treated as (fractional) counts and must be >= 0.

    ``scores`` returns normalized log-posteriors; a class without training
    records gets prior 0 (log-prior ``-inf``).
    """

    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha
        self.class_log_prior_: np.ndarray | None = None
        self.feature_log_prob_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray, n_classes: int, rng: np.random.Generator) -> MultinomialNaiveBayes:
        n_samples = X.shape[0]
        class_counts = np.bincount(y, minlength=n_classes).astype(float)
        with np.errstate(divide="ignore"):
            self.class_log_prior_ = np.log(class_counts / n_samples)

        feature_counts = np.eye(n_classes)[y].T @ X
        smoothed = feature_counts + self.alpha
        self.feature_log_prob_ = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        return self

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        return X @ self.feature_log_prob_.T + self.class_log_prior_

    def scores(self, X: np.ndarray) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        return jll - logsumexp(jll, axis=1, keepdims=True)

    def to_params(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "class_log_prior": _encode(self.class_log_prior_),
            "feature_log_prob": self.feature_log_prob_.tolist(),
        }

    @classmethod
    def from_params(cls, params: dict[str, Any]) -> MultinomialNaiveBayes:
        model = cls(alpha=float(params["alpha"]))
        prior = params["class_log_prior"]
        model.class_log_prior_ = _decode(prior, (len(prior),))
        model.feature_log_prob_ = np.array(params["feature_log_prob"], dtype=float)
        return model


__all__ = ["MultinomialNaiveBayes"]
