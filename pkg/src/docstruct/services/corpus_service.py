"""
Corpus Service - bookmark labeling and dataset construction.

This service provides:
- Mapping bookmark (TOC) entries onto document lines to derive line labels
- Stratified fold assignment and class balancing for labeled datasets
- Line, header-level and four-class datasets built from labeled documents
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any

import numpy as np

from ..features.featurizer import DocumentFeaturizer
from ..ingest.line_csv import bookmarks_from_json
from ..models.dataset import LabeledDataset
from ..models.document import BookmarkEntry, Document
from ..utils.concurrency import map_documents
from ..utils.error_handler import ContractError, UsageError
from ..utils.serialization_utils import canonical_json, read_text
from ..utils.text_utils import header_similarity, normalize_header

logger = logging.getLogger(__name__)

MAX_HEADER_LEVEL = 3

DATASET_TASKS = ("line", "level", "four_class")
TASK_ALPHABETS: dict[str, tuple[int, ...]] = {
    "line": (0, 1),
    "level": (1, 2, 3),
    "four_class": (0, 1, 2, 3),
}


@dataclass(frozen=True)
class BookmarkMatch:
    entry: BookmarkEntry
    line_index: int
    score: float


@dataclass(frozen=True)
class BookmarkMapping:
    """A labeled document with the diagnostics of its bookmark matching."""

    document: Document
    matches: tuple[BookmarkMatch, ...] = ()
    unmatched: tuple[BookmarkEntry, ...] = ()
    threshold: float = 0.85

    @property
    def labeled_lines(self) -> int:
        return len(self.matches)

    def to_dict(self) -> dict[str, Any]:
        return {
            "doc_id": self.document.doc_id,
            "matched": [
                {
                    "depth": m.entry.depth,
                    "line_index": m.line_index,
                    "order": m.entry.order,
                    "score": m.score,
                    "title": m.entry.title,
                }
                for m in self.matches
            ],
            "threshold": self.threshold,
            "unmatched": [entry.to_dict() for entry in self.unmatched],
        }


class CorpusService:
    """Service for labeling documents and building classifier datasets."""

    @staticmethod
    def map_bookmarks_to_labels(
        doc: Document, similarity_threshold: float = 0.85
    ) -> BookmarkMapping:
        """
        Label every line from the document's bookmark TOC.

        A line matching an entry (normalized similarity >= threshold) gets the
        entry's depth, all other lines 0. Candidate (line, entry) pairs are
        taken greedily by descending score, ties by document order and then
        TOC order; every line and every entry is used at most once.

        Args:
            doc: Document carrying a ``toc``
            similarity_threshold: Minimum similarity in (0, 1]

        Returns:
            BookmarkMapping with the labeled document and unmatched entries
        """
        if doc.toc is None:
            raise ContractError(f"Document {doc.doc_id} has no bookmark TOC")
        if not 0.0 < similarity_threshold <= 1.0:
            raise ContractError(f"similarity_threshold must be in (0, 1], got {similarity_threshold}")

        entries = sorted(doc.toc, key=lambda e: e.order)
        entry_keys = [normalize_header(e.title) for e in entries]
        line_keys = [normalize_header(line.text) for line in doc.lines]

        candidates: list[tuple[float, int, int]] = []
        for li, line_key in enumerate(line_keys):
            if not line_key:
                continue
            for ei, entry_key in enumerate(entry_keys):
                if not entry_key:
                    continue
                score = header_similarity(line_key, entry_key, score_cutoff=similarity_threshold)
                if score >= similarity_threshold:
                    candidates.append((-score, li, ei))
        candidates.sort()

        labels = [0] * len(doc.lines)
        used_lines: set[int] = set()
        used_entries: set[int] = set()
        matches = []
        for neg_score, li, ei in candidates:
            if li in used_lines or ei in used_entries:
                continue
            used_lines.add(li)
            used_entries.add(ei)
            labels[li] = entries[ei].depth
            matches.append(BookmarkMatch(entries[ei], li, -neg_score))

        matches.sort(key=lambda m: m.line_index)
        unmatched = tuple(e for ei, e in enumerate(entries) if ei not in used_entries)
        if unmatched:
            logger.warning(
                "Document %s: %d of %d bookmark entries matched no line",
                doc.doc_id,
                len(unmatched),
                len(entries),
            )
        return BookmarkMapping(
            document=doc.with_labels(labels),
            matches=tuple(matches),
            unmatched=unmatched,
            threshold=similarity_threshold,
        )

    @staticmethod
    def label_corpus(
        docs: Sequence[Document], similarity_threshold: float = 0.85, threads: int = 1
    ) -> list[BookmarkMapping]:
        """Map bookmarks for many documents on the document work pool."""
        return map_documents(
            lambda doc: CorpusService.map_bookmarks_to_labels(doc, similarity_threshold),
            docs,
            threads,
        )

    @staticmethod
    def make_stratified_folds(ds: LabeledDataset, k: int, seed: int) -> LabeledDataset:
        return ds.stratified_folds(k, seed)

    @staticmethod
    def balance_classes(ds: LabeledDataset, seed: int) -> LabeledDataset:
        missing = [label for label, n in ds.class_counts().items() if n == 0]
        if missing:
            logger.info("Classes %s have no records and are left out of balancing", missing)
        return ds.balanced(seed)

    @staticmethod
    def task_labels(doc: Document, task: str) -> list[tuple[int, int]]:
        """(line index, class) pairs of ``doc`` for a dataset task.

        Bookmark depths beyond three are clamped to three.
        """
        if task not in DATASET_TASKS:
            raise ContractError(f"Unknown dataset task {task!r}; expected one of {DATASET_TASKS}")
        if not doc.lines:
            return []
        if not doc.is_labeled:
            raise ContractError(f"Document {doc.doc_id} has unlabeled lines")

        pairs = []
        for i, label in enumerate(doc.labels):
            level = min(int(label), MAX_HEADER_LEVEL)
            if task == "line":
                pairs.append((i, int(level >= 1)))
            elif task == "level":
                if level >= 1:
                    pairs.append((i, level))
            else:
                pairs.append((i, level))
        return pairs

    @staticmethod
    def build_line_dataset(
        docs: Sequence[Document],
        featurizer: DocumentFeaturizer,
        task: str = "line",
        mode: str = "combined",
        threads: int = 1,
    ) -> LabeledDataset:
        """
        Featurize labeled documents into a dataset for one task.

        Args:
            docs: Labeled documents
            featurizer: Fitted featurizer
            task: ``line`` (0/1), ``level`` (headers only, 1..3) or ``four_class`` (0..3)
            mode: Vector mode (``layout``, ``text`` or ``combined``)
            threads: Document work pool size

        Returns:
            LabeledDataset whose record ids are ``doc_id:line_index``
        """
        dim = featurizer.dimension(mode)

        def featurize(doc: Document) -> tuple[np.ndarray, list[int], list[str]]:
            pairs = CorpusService.task_labels(doc, task)
            if not pairs:
                return np.zeros((0, dim)), [], []
            rows = [i for i, _ in pairs]
            matrix = featurizer.matrix(doc, mode)[rows]
            return matrix, [y for _, y in pairs], [f"{doc.doc_id}:{i}" for i in rows]

        parts = map_documents(featurize, docs, threads)
        X = np.vstack([p[0] for p in parts]) if parts else np.zeros((0, dim))
        y = np.array([label for p in parts for label in p[1]], dtype=np.int64)
        record_ids = tuple(rid for p in parts for rid in p[2])

        ds = LabeledDataset(
            X=X,
            y=y,
            class_alphabet=TASK_ALPHABETS[task],
            record_ids=record_ids,
            mode=mode,
        )
        logger.info(
            "Built %s dataset (%s): %d records, class counts %s",
            task,
            mode,
            len(ds),
            ds.class_counts(),
        )
        return ds

    @staticmethod
    def load_bookmarks(source: str | Path | IO[str]) -> list[BookmarkEntry]:
        """Read a bookmark JSON array of ``{title, depth, order}``."""
        if isinstance(source, str | Path):
            path = Path(source)
            if not path.exists():
                raise UsageError(f"Bookmark file not found: {path}")
            text = read_text(path)
        else:
            text = source.read()
        return bookmarks_from_json(text)

    @staticmethod
    def dump_bookmarks(entries: Sequence[BookmarkEntry]) -> str:
        return canonical_json([entry.to_dict() for entry in entries])


__all__ = [
    "MAX_HEADER_LEVEL",
    "DATASET_TASKS",
    "TASK_ALPHABETS",
    "BookmarkMatch",
    "BookmarkMapping",
    "CorpusService",
]
