"""
Word n-gram TF-IDF vectorizer.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any

from ..utils.error_handler import ContractError
from ..utils.text_utils import word_tokens

logger = logging.getLogger(__name__)


def ngrams(tokens: list[str], n_range: tuple[int, int]) -> list[str]:
    """All n-grams with ``n_range[0] <= n <= n_range[1]``, space-joined."""
    low, high = n_range
    grams = []
    for n in range(low, high + 1):
        grams.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return grams


@dataclass(frozen=True)
class NgramVectorizer:
    """Fitted n-gram vocabulary with document frequencies.

    Term ids are dense and assigned in lexicographic term order.
    """

    vocabulary: MappingProxyType
    document_frequency: tuple[int, ...]
    corpus_size: int
    n_range: tuple[int, int] = (1, 3)

    def __len__(self) -> int:
        return len(self.vocabulary)

    def idf(self, term_id: int) -> float:
        return 1.0 + math.log(self.corpus_size / (1 + self.document_frequency[term_id]))

    def to_dict(self) -> dict[str, Any]:
        terms = sorted(self.vocabulary, key=self.vocabulary.__getitem__)
        return {
            "corpus_size": self.corpus_size,
            "document_frequency": list(self.document_frequency),
            "n_range": list(self.n_range),
            "terms": terms,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> NgramVectorizer:
        terms = list(data["terms"])
        df = tuple(int(v) for v in data["document_frequency"])
        if len(terms) != len(df):
            raise ContractError("terms and document_frequency differ in length")
        return cls(
            vocabulary=MappingProxyType({term: i for i, term in enumerate(terms)}),
            document_frequency=df,
            corpus_size=int(data["corpus_size"]),
            n_range=(int(data["n_range"][0]), int(data["n_range"][1])),
        )


def fit_ngram_vectorizer(
    texts: Iterable[str],
    n_range: tuple[int, int] = (1, 3),
    min_df: int = 3,
    max_features: int | None = None,
) -> NgramVectorizer:
    """Keep n-grams occurring in at least ``min_df`` texts.

    With ``max_features`` only the most frequent survive (document frequency
    descending, ties lexicographic).
    """
    low, high = n_range
    if not 1 <= low <= high:
        raise ContractError(f"Invalid n-gram range {n_range}")

    df: Counter[str] = Counter()
    corpus_size = 0
    for text in texts:
        corpus_size += 1
        df.update(set(ngrams(word_tokens(text), n_range)))

    kept = [(term, count) for term, count in df.items() if count >= min_df]
    if max_features is not None and len(kept) > max_features:
        kept.sort(key=lambda item: (-item[1], item[0]))
        kept = kept[:max_features]
    kept.sort(key=lambda item: item[0])

    logger.debug(
        "Fitted n-gram vectorizer: %d of %d terms over %d texts",
        len(kept),
        len(df),
        corpus_size,
    )
    return NgramVectorizer(
        vocabulary=MappingProxyType({term: i for i, (term, _) in enumerate(kept)}),
        document_frequency=tuple(count for _, count in kept),
        corpus_size=corpus_size,
        n_range=n_range,
    )


def vectorize_text(v: NgramVectorizer, text: str) -> dict[int, float]:
    """L2-normalized ``tf * (1 + ln(N / (1 + df)))`` over in-vocabulary n-grams."""
    counts = Counter(
        v.vocabulary[gram]
        for gram in ngrams(word_tokens(text), v.n_range)
        if gram in v.vocabulary
    )
    weights = {term_id: tf * v.idf(term_id) for term_id, tf in counts.items()}
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {term_id: w / norm for term_id, w in sorted(weights.items())}


__all__ = ["ngrams", "NgramVectorizer", "fit_ngram_vectorizer", "vectorize_text"]
