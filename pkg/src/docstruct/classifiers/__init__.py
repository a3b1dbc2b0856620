"""
Line, header-level and section classifiers with their evaluation harness.
"""

from .decision_tree import DecisionTree, best_split, gini_impurity, gini_index, split_score
from .linear_svm import LinearSVM
from .metrics import CrossValidationResult, EvalReport, cross_validate, evaluate, evaluate_predictions
from .model import (
    KINDS,
    Model,
    load_model,
    load_model_file,
    model_from_dict,
    model_to_dict,
    predict,
    predict_batch,
    resolve_kind,
    save_model,
    save_model_file,
    train,
)
from .naive_bayes import MultinomialNaiveBayes

__all__ = [
    "DecisionTree",
    "best_split",
    "gini_index",
    "gini_impurity",
    "split_score",
    "LinearSVM",
    "MultinomialNaiveBayes",
    "KINDS",
    "Model",
    "resolve_kind",
    "train",
    "predict",
    "predict_batch",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
    "save_model_file",
    "load_model_file",
    "EvalReport",
    "CrossValidationResult",
    "evaluate",
    "evaluate_predictions",
    "cross_validate",
]
