"""
Feature vectors: the 16 layout features plus an optional sparse TF-IDF block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..utils.error_handler import ContractError

LAYOUT_FEATURES = (
    "pos_nnp",
    "without_verb_higher_line_space",
    "font_weight",
    "bold_italic",
    "at_least_3_lines_upper",
    "higher_line_space",
    "number_dot",
    "text_len_group",
    "seq_number",
    "colon",
    "header_0",
    "header_1",
    "header_2",
    "title_case",
    "all_upper",
    "voc",
)
N_LAYOUT = len(LAYOUT_FEATURES)

VECTOR_MODES = ("layout", "text", "combined")


@dataclass(frozen=True)
class FeatureVector:
    """Layout block (16 values) and sparse text block ``term_id -> weight``.

    ``text_dim`` is the vocabulary size of the vectorizer that produced the
    text block; 0 means no text block is attached.
    """

    layout: tuple[float, ...]
    text: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    text_dim: int = 0

    def __post_init__(self) -> None:
        if len(self.layout) != N_LAYOUT:
            raise ContractError(f"Layout block needs {N_LAYOUT} values, got {len(self.layout)}")

    @property
    def dimension(self) -> int:
        return N_LAYOUT + self.text_dim

    def named_layout(self) -> dict[str, float]:
        return dict(zip(LAYOUT_FEATURES, self.layout, strict=True))

    def text_dense(self) -> np.ndarray:
        dense = np.zeros(self.text_dim)
        for term_id, weight in self.text.items():
            dense[term_id] = weight
        return dense

    def to_array(self, mode: str = "combined") -> np.ndarray:
        if mode == "layout":
            return np.asarray(self.layout, dtype=float)
        if mode == "text":
            return self.text_dense()
        if mode == "combined":
            return np.concatenate([np.asarray(self.layout, dtype=float), self.text_dense()])
        raise ContractError(f"Unknown vector mode {mode!r}; expected one of {VECTOR_MODES}")


def combine(layout: FeatureVector, text: dict[int, float], text_dim: int) -> FeatureVector:
    """Attach a text block to a layout vector, leaving the layout values untouched."""
    if any(term_id < 0 or term_id >= text_dim for term_id in text):
        raise ContractError(f"Text block has term ids outside [0, {text_dim})")
    return FeatureVector(
        layout=layout.layout,
        text=MappingProxyType(dict(text)),
        text_dim=text_dim,
    )


__all__ = ["LAYOUT_FEATURES", "N_LAYOUT", "VECTOR_MODES", "FeatureVector", "combine"]
