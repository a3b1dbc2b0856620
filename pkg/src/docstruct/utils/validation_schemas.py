"""
Marshmallow validation schemas for docstruct inputs and configuration.
"""

import math
from typing import Any

from marshmallow import (
    Schema,
    ValidationError,
    fields,
    pre_load,
    validate,
    validates_schema,
)

FONT_WEIGHT_NAMES = {"normal": 400.0, "regular": 400.0, "bold": 700.0}


class FontWeightField(fields.Field):
    """Accepts ``normal``/``bold`` or a numeric weight, loads a float."""

    def _deserialize(self, value: Any, attr: str | None, data: Any, **kwargs: Any) -> float:
        if isinstance(value, str):
            named = FONT_WEIGHT_NAMES.get(value.strip().lower())
            if named is not None:
                return named
        try:
            weight = float(value)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Not a font weight: {value!r}") from e
        if not math.isfinite(weight) or weight <= 0:
            raise ValidationError(f"Font weight must be positive: {value!r}")
        return weight

    def _serialize(self, value: Any, attr: str | None, obj: Any, **kwargs: Any) -> Any:
        return value


class LineRecordRowSchema(Schema):
    """Schema for one row of the line-record CSV."""

    doc_id = fields.Str(required=True, validate=validate.Length(min=1))
    page_number = fields.Int(required=True, validate=validate.Range(min=1))
    text = fields.Str(required=True)
    font_size = fields.Float(
        required=True,
        validate=validate.Range(min=0, min_inclusive=False),
    )
    font_weight = FontWeightField(required=True)
    font_family = fields.Str(required=True)
    x_left = fields.Float(required=True)
    x_right = fields.Float(required=True)
    y_top = fields.Float(required=True)
    y_bottom = fields.Float(required=True)
    page_width = fields.Float(
        required=True,
        validate=validate.Range(min=0, min_inclusive=False),
    )
    page_height = fields.Float(
        required=True,
        validate=validate.Range(min=0, min_inclusive=False),
    )
    label = fields.Int(
        validate=validate.Range(min=0),
        allow_none=True,
        load_default=None,
    )

    @pre_load
    def empty_label_is_absent(self, data: dict[str, Any], **kwargs: Any) -> dict[str, Any]:
        """An empty label cell means "unlabeled"."""
        if isinstance(data, dict) and data.get("label") in ("", None):
            data = dict(data)
            data["label"] = None
        return data

    @validates_schema
    def validate_box(self, data: dict[str, Any], **kwargs: Any) -> None:
        """Validate that the box is not inverted."""
        if data["x_left"] > data["x_right"]:
            raise ValidationError("x_left must not exceed x_right", "x_left")
        if data["y_top"] > data["y_bottom"]:
            raise ValidationError("y_top must not exceed y_bottom", "y_top")


class BookmarkSchema(Schema):
    """Schema for one TOC/bookmark entry."""

    title = fields.Str(required=True)
    depth = fields.Int(required=True, validate=validate.Range(min=1))
    order = fields.Int(required=True, validate=validate.Range(min=0))


class OntologySchema(Schema):
    """Schema for an ontology class set with its alias map."""

    name = fields.Str(required=True, validate=validate.Length(min=1))
    classes = fields.List(
        fields.Str(validate=validate.Length(min=1)),
        required=True,
        validate=validate.Length(min=1),
    )
    aliases = fields.Dict(keys=fields.Str(), values=fields.Str(), load_default=dict)

    @validates_schema
    def validate_classes(self, data: dict[str, Any], **kwargs: Any) -> None:
        """Validate class uniqueness and alias targets."""
        classes = data["classes"]
        if len(set(classes)) != len(classes):
            raise ValidationError("class names must be unique", "classes")
        known = set(classes)
        unknown = sorted(
            alias for alias, target in data.get("aliases", {}).items() if target not in known
        )
        if unknown:
            raise ValidationError(f"aliases map to unknown classes: {unknown}", "aliases")


class CorpusSpecSchema(Schema):
    """Schema for the synthetic corpus generator's specification."""

    n_docs = fields.Int(validate=validate.Range(min=1), load_default=20)
    sections_min = fields.Int(validate=validate.Range(min=1), load_default=6)
    sections_max = fields.Int(validate=validate.Range(min=1), load_default=12)
    depth_probs = fields.List(
        fields.Float(validate=validate.Range(min=0)),
        validate=validate.Length(equal=3),
        load_default=lambda: [0.5, 0.3, 0.2],
    )
    body_lines_min = fields.Int(validate=validate.Range(min=1), load_default=4)
    body_lines_max = fields.Int(validate=validate.Range(min=1), load_default=10)
    font_jitter = fields.Float(validate=validate.Range(min=0), load_default=0.0)
    spacing_jitter = fields.Float(validate=validate.Range(min=0), load_default=0.0)
    header_noise = fields.Float(validate=validate.Range(min=0, max=1), load_default=0.0)
    corruption_rate = fields.Float(validate=validate.Range(min=0, max=1), load_default=0.0)
    distractor_rate = fields.Float(validate=validate.Range(min=0, max=1), load_default=0.3)
    domains = fields.List(fields.Str(), load_default=None, allow_none=True)
    seed = fields.Int(load_default=42)

    @validates_schema
    def validate_ranges(self, data: dict[str, Any], **kwargs: Any) -> None:
        """Validate that ranges are nonempty and depth_probs is a distribution."""
        if data["sections_min"] > data["sections_max"]:
            raise ValidationError("sections_min must not exceed sections_max")
        if data["body_lines_min"] > data["body_lines_max"]:
            raise ValidationError("body_lines_min must not exceed body_lines_max")
        total = sum(data["depth_probs"])
        if abs(total - 1.0) > 1e-9 or data["depth_probs"][0] <= 0:
            raise ValidationError(
                "depth_probs must sum to 1 with a positive level-1 probability",
                "depth_probs",
            )


class PipelineConfigSchema(Schema):
    """Schema for the flat pipeline configuration.

    Fields carry no defaults: absent keys fall back to the
    ``PipelineConfig`` dataclass defaults.
    """

    input_format = fields.Str(validate=validate.OneOf(["tetml", "line_csv"]))
    out_dir = fields.Str(validate=validate.Length(min=1))
    threads = fields.Int(validate=validate.Range(min=1, max=256))
    seed = fields.Int()
    log_level = fields.Str(
        validate=validate.OneOf(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    )

    similarity_threshold = fields.Float(
        validate=validate.Range(min=0, max=1, min_inclusive=False)
    )
    folds = fields.Int(validate=validate.Range(min=2))

    vector_mode = fields.Str(validate=validate.OneOf(["layout", "text", "combined"]))
    vocab_min_frequency = fields.Int(validate=validate.Range(min=1))
    ngram_min_df = fields.Int(validate=validate.Range(min=1))
    ngram_max_features = fields.Int(validate=validate.Range(min=1), allow_none=True)

    classifier = fields.Str(validate=validate.OneOf(["nb", "dt", "svm"]))
    nb_alpha = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    dt_max_depth = fields.Int(validate=validate.Range(min=1))
    dt_min_samples_leaf = fields.Int(validate=validate.Range(min=1))
    svm_c = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    svm_epochs = fields.Int(validate=validate.Range(min=1))

    structure_mode = fields.Str(validate=validate.OneOf(["pipeline", "four_class", "oracle"]))

    ontology = fields.Str(validate=validate.Length(min=1))
    semantic_classifier = fields.Str(validate=validate.OneOf(["nb", "svm"]))
    semantic_truncation = fields.Int(validate=validate.Range(min=1))
    sequence_max_length = fields.Int(validate=validate.Range(min=1))

    k_topics = fields.Int(validate=validate.Range(min=1))
    lda_alpha = fields.Float(validate=validate.Range(min=0, min_inclusive=False), allow_none=True)
    lda_beta = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    lda_iterations = fields.Int(validate=validate.Range(min=1))
    lda_infer_iterations = fields.Int(validate=validate.Range(min=1))
    lda_min_sections = fields.Int(validate=validate.Range(min=1))
    lda_max_fraction = fields.Float(validate=validate.Range(min=0, max=1, min_inclusive=False))
    lda_cap = fields.Int(validate=validate.Range(min=1))
    lda_ngram = fields.Str(validate=validate.OneOf(["word", "bigram", "phrase"]))
    concept_terms = fields.Int(validate=validate.Range(min=0))

    ratio = fields.Float(validate=validate.Range(min=0, max=1, min_inclusive=False))
    textrank_damping = fields.Float(
        validate=validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)
    )
    textrank_tol = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    textrank_max_iter = fields.Int(validate=validate.Range(min=1))

    @pre_load
    def normalize_log_level(self, data: dict[str, Any], **kwargs: Any) -> dict[str, Any]:
        """Accept log levels in any case."""
        if isinstance(data, dict) and isinstance(data.get("log_level"), str):
            data = dict(data)
            data["log_level"] = data["log_level"].upper()
        return data


__all__ = [
    "FONT_WEIGHT_NAMES",
    "FontWeightField",
    "LineRecordRowSchema",
    "BookmarkSchema",
    "OntologySchema",
    "CorpusSpecSchema",
    "PipelineConfigSchema",
]
