"""
Linear SVM trained with Pegasos-style stochastic subgradient descent.

Hinge loss with L2 regularization ``lambda = 1 / (C * n)``, learning rate
``1 / (lambda * t)`` and a projection onto the ball of radius
``1 / sqrt(lambda)``. The bias is learned as the weight of a constant input.
More than two classes are handled one-vs-rest, all binary problems advancing
together over the same shuffled sample order.
"""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)


class LinearSVM:
    def __init__(self, C: float = 1.0, epochs: int = 50):
        self.C = C
        self.epochs = epochs
        self.weights_: np.ndarray | None = None  # (n_classes, d)
        self.bias_: np.ndarray | None = None  # (n_classes,)

    def fit(self, X: np.ndarray, y: np.ndarray, n_classes: int, rng: np.random.Generator) -> LinearSVM:
        n, d = X.shape
        Xb = np.hstack([X, np.ones((n, 1))])
        binary = n_classes == 2
        # targets in {-1, +1}; a two-class problem is a single machine for class 1
        if binary:
            targets = np.where(y == 1, 1.0, -1.0)[:, None]
        else:
            targets = np.where(y[:, None] == np.arange(n_classes)[None, :], 1.0, -1.0)

        lam = 1.0 / (self.C * n)
        radius = 1.0 / np.sqrt(lam)
        W = np.zeros((targets.shape[1], d + 1))
        t = 0
        for _ in range(self.epochs):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (lam * t)
                x = Xb[i]
                violated = targets[i] * (W @ x) < 1.0
                W *= 1.0 - eta * lam
                if violated.any():
                    W[violated] += eta * targets[i, violated][:, None] * x
                norms = np.linalg.norm(W, axis=1)
                over = norms > radius
                if over.any():
                    W[over] *= (radius / norms[over])[:, None]

        if binary:
            W = np.vstack([-W[0], W[0]])
        self.weights_ = W[:, :-1].copy()
        self.bias_ = W[:, -1].copy()
        logger.debug("Trained linear SVM: %d classes, %d features, %d steps", n_classes, d, t)
        return self

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Margins ``w_c . x + b_c`` per class."""
        return X @ self.weights_.T + self.bias_

    def to_params(self) -> dict[str, Any]:
        return {
            "C": self.C,
            "bias": self.bias_.tolist(),
            "epochs": self.epochs,
            "weights": self.weights_.tolist(),
        }

    @classmethod
    def from_params(cls, params: dict[str, Any]) -> LinearSVM:
        model = cls(C=float(params["C"]), epochs=int(params["epochs"]))
        model.weights_ = np.array(params["weights"], dtype=float)
        model.bias_ = np.array(params["bias"], dtype=float)
        if model.weights_.ndim == 1:
            model.weights_ = model.weights_.reshape(len(model.bias_), -1)
        return model


__all__ = ["LinearSVM"]
