"""
Structure Service - from classified lines to a section tree.

This service provides:
- Line classification (section header vs regular text)
- Header level classification (1, 2, 3)
- Stack-based section boundary detection producing a TocTree
- TOC listings, plain-text TOC export and the per-document StructurePipeline
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..classifiers.model import Model, predict_batch
from ..features.featurizer import DocumentFeaturizer
from ..models.document import Document
from ..models.section import SectionNode, TocTree
from ..utils.error_handler import ContractError
from .corpus_service import MAX_HEADER_LEVEL, TASK_ALPHABETS

logger = logging.getLogger(__name__)

STRUCTURE_MODES = ("pipeline", "four_class", "oracle")


class TocEntry(NamedTuple):
    title: str
    level: int
    page: int


@dataclass
class StructureResult:
    """A document's tree plus the per-line decisions that produced it."""

    tree: TocTree
    line_labels: list[int] = field(default_factory=list)
    header_levels: list[tuple[int, int]] = field(default_factory=list)
    line_scores: np.ndarray | None = None


def _require_alphabet(m: Model, task: str) -> None:
    if tuple(m.class_alphabet) != TASK_ALPHABETS[task]:
        raise ContractError(
            f"Expected a model over {TASK_ALPHABETS[task]} for {task} classification, "
            f"got classes {m.class_alphabet}"
        )


def _model_matrix(doc: Document, m: Model, featurizer: DocumentFeaturizer) -> np.ndarray:
    mode = m.mode or "combined"
    if featurizer.dimension(mode) != m.feature_dimension:
        raise ContractError(
            f"Model expects {m.feature_dimension} features but the featurizer "
            f"produces {featurizer.dimension(mode)} in {mode} mode"
        )
    return featurizer.matrix(doc, mode)


class StructureService:
    """Service for recovering the logical structure of documents."""

    @staticmethod
    def classify_lines(
        doc: Document, m: Model, featurizer: DocumentFeaturizer
    ) -> tuple[list[int], np.ndarray]:
        """
        Label every line as section header (1) or regular text (0).

        Args:
            doc: Document to classify
            m: Two-class model over (0, 1)
            featurizer: Featurizer the model was trained with

        Returns:
            Tuple of per-line labels and the per-line score rows
        """
        _require_alphabet(m, "line")
        if not doc.lines:
            return [], np.zeros((0, 2))
        labels, scores = predict_batch(m, _model_matrix(doc, m, featurizer))
        return [int(v) for v in labels], scores

    @staticmethod
    def classify_header_levels(
        doc: Document,
        header_ids: Sequence[int],
        m: Model,
        featurizer: DocumentFeaturizer,
    ) -> list[int]:
        """Predict a level in {1, 2, 3} for each header line of ``doc``."""
        _require_alphabet(m, "level")
        if not header_ids:
            return []
        matrix = _model_matrix(doc, m, featurizer)[list(header_ids)]
        levels, _ = predict_batch(m, matrix)
        return [int(v) for v in levels]

    @staticmethod
    def detect_section_boundaries(
        doc: Document, headers: Sequence[tuple[int, int]]
    ) -> TocTree:
        """
        Build the section tree from (line index, level) header pairs.

        A header of level k closes every open section of level >= k and opens
        a node under the nearest open section of lower level; a header whose
        level skips ahead is adopted by that section. Body lines attach to
        the innermost open section, lines before the first header form the
        preamble. Levels are clamped to 1..3.
        """
        levels: dict[int, int] = {}
        for line_id, level in headers:
            if not 0 <= line_id < len(doc.lines):
                raise ContractError(f"Header line {line_id} is outside document {doc.doc_id}")
            if line_id in levels:
                raise ContractError(f"Line {line_id} is listed twice as a header")
            levels[line_id] = min(max(int(level), 1), MAX_HEADER_LEVEL)

        tree = TocTree(doc_id=doc.doc_id)
        stack: list[SectionNode] = []
        for line_id, line in enumerate(doc.lines):
            level = levels.get(line_id)
            if level is None:
                if stack:
                    stack[-1].body.append(line)
                    stack[-1].body_line_ids.append(line_id)
                else:
                    tree.preamble.append(line)
                    tree.preamble_line_ids.append(line_id)
                continue

            while stack and stack[-1].level >= level:
                stack.pop()
            node = SectionNode(header=line, header_line_id=line_id, level=level)
            if stack:
                stack[-1].children.append(node)
            else:
                tree.roots.append(node)
            stack.append(node)

        return tree

    @staticmethod
    def oracle_headers(doc: Document) -> list[tuple[int, int]]:
        """Header (line index, level) pairs from ground-truth labels."""
        if doc.lines and not doc.is_labeled:
            raise ContractError(f"Oracle mode needs labels on every line of {doc.doc_id}")
        return [(i, min(int(label), MAX_HEADER_LEVEL)) for i, label in enumerate(doc.labels) if label]

    @staticmethod
    def build_toc(tree: TocTree) -> list[TocEntry]:
        """Pre-order (title, level, page) listing; header text kept verbatim."""
        return [TocEntry(node.title, node.level, node.page) for node in tree.iter_sections()]

    @staticmethod
    def toc_to_text(tree: TocTree) -> str:
        """Indented plain-text TOC, two spaces per level below the top."""
        lines = [
            f"{'  ' * (entry.level - 1)}{entry.title} .... {entry.page}"
            for entry in StructureService.build_toc(tree)
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    @staticmethod
    def check_line_conservation(tree: TocTree, doc: Document) -> None:
        """Raise unless flattening ``tree`` reproduces the document's line order."""
        flattened = tree.flatten()
        if flattened != list(range(len(doc.lines))):
            raise ContractError(
                f"Tree for {doc.doc_id} holds {len(flattened)} lines out of order "
                f"or lost lines (document has {len(doc.lines)})"
            )


class StructurePipeline:
    """Per-document structure recovery in one of three modes.

    ``pipeline`` chains the line model and the level model, ``four_class``
    uses a single model over {0, 1, 2, 3}, ``oracle`` reads ground-truth
    labels and needs no models.
    """

    def __init__(
        self,
        mode: str = "pipeline",
        featurizer: DocumentFeaturizer | None = None,
        line_model: Model | None = None,
        level_model: Model | None = None,
        four_class_model: Model | None = None,
    ):
        if mode not in STRUCTURE_MODES:
            raise ContractError(f"Unknown structure mode {mode!r}; expected one of {STRUCTURE_MODES}")
        if mode == "pipeline" and (featurizer is None or line_model is None or level_model is None):
            raise ContractError("Pipeline mode needs a featurizer, a line model and a level model")
        if mode == "four_class" and (featurizer is None or four_class_model is None):
            raise ContractError("Four-class mode needs a featurizer and a four-class model")
        if four_class_model is not None:
            _require_alphabet(four_class_model, "four_class")
        self.mode = mode
        self.featurizer = featurizer
        self.line_model = line_model
        self.level_model = level_model
        self.four_class_model = four_class_model

    def headers(self, doc: Document) -> tuple[list[int], list[tuple[int, int]], np.ndarray | None]:
        """Per-line header flags, (line, level) pairs and line scores."""
        if self.mode == "oracle":
            headers = StructureService.oracle_headers(doc)
            flags = [0] * len(doc.lines)
            for line_id, _ in headers:
                flags[line_id] = 1
            return flags, headers, None

        if self.mode == "four_class":
            if not doc.lines:
                return [], [], np.zeros((0, 4))
            labels, scores = predict_batch(
                self.four_class_model, _model_matrix(doc, self.four_class_model, self.featurizer)
            )
            headers = [(i, int(v)) for i, v in enumerate(labels) if v > 0]
            return [int(v > 0) for v in labels], headers, scores

        flags, scores = StructureService.classify_lines(doc, self.line_model, self.featurizer)
        header_ids = [i for i, flag in enumerate(flags) if flag == 1]
        levels = StructureService.classify_header_levels(
            doc, header_ids, self.level_model, self.featurizer
        )
        return flags, list(zip(header_ids, levels, strict=True)), scores

    def run(self, doc: Document) -> StructureResult:
        flags, headers, scores = self.headers(doc)
        tree = StructureService.detect_section_boundaries(doc, headers)
        StructureService.check_line_conservation(tree, doc)
        logger.debug(
            "Document %s: %d headers, %d top-level sections", doc.doc_id, len(headers), len(tree.roots)
        )
        return StructureResult(tree=tree, line_labels=flags, header_levels=headers, line_scores=scores)

    def predicted_four_class(self, doc: Document) -> list[int]:
        """Per-line labels in the four-class alphabet, for comparing modes."""
        flags, headers, _ = self.headers(doc)
        labels = [0] * len(flags)
        for line_id, level in headers:
            labels[line_id] = min(max(level, 1), MAX_HEADER_LEVEL)
        return labels


__all__ = [
    "STRUCTURE_MODES",
    "TocEntry",
    "StructureResult",
    "StructureService",
    "StructurePipeline",
]
