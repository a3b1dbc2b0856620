"""
Header vocabulary: frequent non-stoplist words of training headers.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

from ..utils.text_utils import default_stoplist, strip_punctuation, word_tokens

logger = logging.getLogger(__name__)


def header_words(text: str) -> list[str]:
    """Lowercased, punctuation-stripped words of a header; pure numbers dropped."""
    return [t for t in word_tokens(strip_punctuation(text)) if not t.isdigit()]


@dataclass(frozen=True)
class HeaderVocabulary:
    terms: frozenset[str]
    min_frequency: int
    stoplist: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word in self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict[str, Any]:
        return {"min_frequency": self.min_frequency, "terms": sorted(self.terms)}

    @classmethod
    def from_dict(cls, data: dict[str, Any], stoplist: frozenset[str] | None = None) -> HeaderVocabulary:
        return cls(
            terms=frozenset(data["terms"]),
            min_frequency=int(data["min_frequency"]),
            stoplist=default_stoplist() if stoplist is None else stoplist,
        )


def build_header_vocabulary(
    headers: Iterable[str],
    min_frequency: int = 3,
    stoplist: frozenset[str] | None = None,
) -> HeaderVocabulary:
    """Words occurring at least ``min_frequency`` times across ``headers``."""
    stoplist = default_stoplist() if stoplist is None else frozenset(w.lower() for w in stoplist)
    counts = Counter(word for header in headers for word in header_words(header))
    terms = frozenset(
        word for word, count in counts.items() if count >= min_frequency and word not in stoplist
    )
    logger.debug("Header vocabulary: %d terms from %d distinct words", len(terms), len(counts))
    return HeaderVocabulary(terms=terms, min_frequency=min_frequency, stoplist=stoplist)


def top_header_words(headers: Iterable[str], n: int, stoplist: frozenset[str] | None = None) -> list[tuple[str, int]]:
    """The ``n`` most frequent non-stoplist header words, ties lexicographic."""
    stoplist = default_stoplist() if stoplist is None else stoplist
    counts = Counter(
        word for header in headers for word in header_words(header) if word not in stoplist
    )
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:n]


__all__ = ["HeaderVocabulary", "build_header_vocabulary", "header_words", "top_header_words"]
