"""
Document featurizer: header vocabulary + n-gram vectorizer + tagger.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..models.document import Document
from ..utils.error_handler import ContractError, ModelFormatError, UsageError
from ..utils.serialization_utils import canonical_json, read_text, write_text
from .layout import HeuristicTagger, PosTagger, document_contexts, extract_layout_features
from .ngrams import NgramVectorizer, fit_ngram_vectorizer, vectorize_text
from .vector import N_LAYOUT, VECTOR_MODES, FeatureVector, combine
from .vocabulary import HeaderVocabulary, build_header_vocabulary

logger = logging.getLogger(__name__)

VOCABULARY_FILE = "vocabulary.json"
NGRAMS_FILE = "ngrams.json"


class DocumentFeaturizer:
    """Turns documents into per-line feature matrices in any vector mode."""

    def __init__(
        self,
        vocabulary: HeaderVocabulary,
        vectorizer: NgramVectorizer,
        tagger: PosTagger | None = None,
    ):
        self.vocabulary = vocabulary
        self.vectorizer = vectorizer
        self.tagger = tagger if tagger is not None else HeuristicTagger(vocabulary.terms)

    @classmethod
    def fit(
        cls,
        docs: Sequence[Document],
        vocab_min_frequency: int = 3,
        min_df: int = 3,
        max_features: int | None = None,
        n_range: tuple[int, int] = (1, 3),
        stoplist: frozenset[str] | None = None,
        tagger: PosTagger | None = None,
    ) -> DocumentFeaturizer:
        """Fit on labeled documents: headers feed the vocabulary, all lines the n-grams."""
        headers = [
            line.text
            for doc in docs
            for line in doc.lines
            if line.label is not None and line.label >= 1
        ]
        vocabulary = build_header_vocabulary(headers, vocab_min_frequency, stoplist)
        vectorizer = fit_ngram_vectorizer(
            (line.text for doc in docs for line in doc.lines),
            n_range=n_range,
            min_df=min_df,
            max_features=max_features,
        )
        logger.info(
            "Fitted featurizer on %d documents: %d vocabulary terms, %d n-grams",
            len(docs),
            len(vocabulary),
            len(vectorizer),
        )
        return cls(vocabulary, vectorizer, tagger)

    def dimension(self, mode: str) -> int:
        if mode == "layout":
            return N_LAYOUT
        if mode == "text":
            return len(self.vectorizer)
        if mode == "combined":
            return N_LAYOUT + len(self.vectorizer)
        raise ContractError(f"Unknown vector mode {mode!r}; expected one of {VECTOR_MODES}")

    def layout_vectors(self, doc: Document) -> list[FeatureVector]:
        contexts = document_contexts(doc.lines)
        return [
            extract_layout_features(
                line, context, doc.page_stats(line.page_number), self.vocabulary, self.tagger
            )
            for line, context in zip(doc.lines, contexts, strict=True)
        ]

    def document_vectors(self, doc: Document) -> list[FeatureVector]:
        """Combined (layout + text) vectors for every line."""
        dim = len(self.vectorizer)
        return [
            combine(vector, vectorize_text(self.vectorizer, line.text), dim)
            for vector, line in zip(self.layout_vectors(doc), doc.lines, strict=True)
        ]

    def layout_matrix(self, doc: Document) -> np.ndarray:
        vectors = self.layout_vectors(doc)
        if not vectors:
            return np.zeros((0, N_LAYOUT))
        return np.array([v.layout for v in vectors], dtype=float)

    def text_matrix(self, doc: Document) -> np.ndarray:
        matrix = np.zeros((len(doc.lines), len(self.vectorizer)))
        for row, line in enumerate(doc.lines):
            for term_id, weight in vectorize_text(self.vectorizer, line.text).items():
                matrix[row, term_id] = weight
        return matrix

    def matrix(self, doc: Document, mode: str) -> np.ndarray:
        """Feature rows for every line of ``doc`` in ``mode``."""
        if mode == "layout":
            return self.layout_matrix(doc)
        if mode == "text":
            return self.text_matrix(doc)
        if mode == "combined":
            return np.hstack([self.layout_matrix(doc), self.text_matrix(doc)])
        raise ContractError(f"Unknown vector mode {mode!r}; expected one of {VECTOR_MODES}")

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        write_text(directory / VOCABULARY_FILE, canonical_json(self.vocabulary.to_dict()))
        write_text(directory / NGRAMS_FILE, canonical_json(self.vectorizer.to_dict()))

    @classmethod
    def load(cls, directory: str | Path) -> DocumentFeaturizer:
        directory = Path(directory)
        for name in (VOCABULARY_FILE, NGRAMS_FILE):
            if not (directory / name).exists():
                raise UsageError(f"Featurizer file not found: {directory / name}")
        try:
            vocabulary = HeaderVocabulary.from_dict(json.loads(read_text(directory / VOCABULARY_FILE)))
            vectorizer = NgramVectorizer.from_dict(json.loads(read_text(directory / NGRAMS_FILE)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"Corrupt featurizer in {directory}: {e!r}") from e
        return cls(vocabulary, vectorizer)


__all__ = ["DocumentFeaturizer", "VOCABULARY_FILE", "NGRAMS_FILE"]
