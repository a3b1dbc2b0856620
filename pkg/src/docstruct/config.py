"""Pipeline configuration module.

Values come from the dataclass defaults, an optional flat YAML file,
``DOCSTRUCT_``-prefixed environment variables and finally CLI flags, each
layer overriding the previous one.
"""

from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

import yaml
from marshmallow import ValidationError

from .utils.error_handler import SchemaError, UsageError
from .utils.validation_schemas import PipelineConfigSchema

logger = logging.getLogger(__name__)

ENV_PREFIX = "DOCSTRUCT_"


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the pipeline and its experiments."""

    # Input / output
    input_format: str = "line_csv"
    out_dir: str = "out"
    threads: int = 4
    seed: int = 42
    log_level: str = "INFO"

    # Labeling and splits
    similarity_threshold: float = 0.85
    folds: int = 5

    # Features
    vector_mode: str = "combined"
    vocab_min_frequency: int = 3
    ngram_min_df: int = 3
    ngram_max_features: int | None = 2000

    # Classifiers
    classifier: str = "svm"
    nb_alpha: float = 1.0
    dt_max_depth: int = 12
    dt_min_samples_leaf: int = 5
    svm_c: float = 1.0
    svm_epochs: int = 50

    # Structure
    structure_mode: str = "pipeline"

    # Semantics
    ontology: str = "arxiv"
    semantic_classifier: str = "nb"
    semantic_truncation: int = 200
    sequence_max_length: int = 15

    # Topics
    k_topics: int = 10
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    lda_iterations: int = 500
    lda_infer_iterations: int = 50
    lda_min_sections: int = 20
    lda_max_fraction: float = 0.10
    lda_cap: int = 100000
    lda_ngram: str = "word"
    concept_terms: int = 3

    # Summaries
    ratio: float = 0.2
    textrank_damping: float = 0.85
    textrank_tol: float = 1e-6
    textrank_max_iter: int = 100

    @property
    def effective_lda_alpha(self) -> float:
        """Dirichlet prior on document-topic mixtures, 50/K unless set."""
        if self.lda_alpha is not None:
            return self.lda_alpha
        return 50.0 / self.k_topics

    def classifier_hyperparams(self, kind: str) -> dict[str, Any]:
        """Hyperparameters for a classifier kind (full or short name)."""
        kind = {"nb": "naive_bayes", "dt": "decision_tree", "svm": "linear_svm"}.get(kind, kind)
        if kind == "naive_bayes":
            return {"alpha": self.nb_alpha}
        if kind == "decision_tree":
            return {"max_depth": self.dt_max_depth, "min_samples_leaf": self.dt_min_samples_leaf}
        if kind == "linear_svm":
            return {"C": self.svm_c, "epochs": self.svm_epochs}
        raise UsageError(f"Unknown classifier kind {kind!r}")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _env_overrides() -> dict[str, str]:
    overrides = {}
    for field in fields(PipelineConfig):
        value = os.getenv(f"{ENV_PREFIX}{field.name.upper()}")
        if value is not None:
            overrides[field.name] = value
    return overrides


def _read_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"Config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise SchemaError(f"Config file {path} is not valid YAML: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise SchemaError(f"Config file {path} must be a flat mapping")
    return data


def load_config(
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> PipelineConfig:
    """Build a validated config from file, environment and explicit overrides.

    ``None`` values in ``overrides`` mean "not given" and are skipped.
    """
    raw: dict[str, Any] = {}
    if path is not None:
        raw.update(_read_config_file(path))
    raw.update(_env_overrides())
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})

    try:
        loaded = PipelineConfigSchema().load(raw)
    except ValidationError as e:
        raise SchemaError(f"Invalid configuration: {e.messages}") from e

    config = PipelineConfig(**loaded)
    logger.debug("Loaded configuration: %s", config)
    return config


def default_config_yaml(config: PipelineConfig | None = None) -> str:
    """The configuration (defaults unless given) as the flat YAML file ``--config`` accepts."""
    header = (
        "# docstruct default configuration\n"
        "# Every key may also be set through a DOCSTRUCT_<KEY> environment\n"
        "# variable; CLI flags take precedence over both.\n"
    )
    body = yaml.safe_dump((config or PipelineConfig()).to_dict(), sort_keys=True)
    return header + body


__all__ = ["PipelineConfig", "load_config", "default_config_yaml", "ENV_PREFIX"]
