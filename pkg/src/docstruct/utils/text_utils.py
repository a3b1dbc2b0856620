"""
Text helpers shared by labeling, featurization and semantic mapping.
"""

import re
from functools import lru_cache
from pathlib import Path

from rapidfuzz.distance import Levenshtein

_WHITESPACE_RE = re.compile(r"\s+")
_WORD_RE = re.compile(r"\w+", re.UNICODE)
_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

# "2.3.1 ", "2.", "IV.", "iv)", "A.", "A.1", "(b)" at the start of a header;
# a bare number needs trailing whitespace so "3D Models" keeps its "3"
NUMBERING_RE = re.compile(
    r"""^\s*(?:
        \(?\d+(?:\.\d+)*(?:[.):]\s*|\s+)
        | [A-Z](?:\.\d+)+\.?\s*
        | (?:[IVXLC]+|[ivx]+)[.):]\s*
        | [IVXLC]+\s+
        | \(?[A-Za-z][.)]\s*
    )""",
    re.VERBOSE,
)


def collapse_whitespace(text: str) -> str:
    return _WHITESPACE_RE.sub(" ", text).strip()


def strip_numbering(text: str) -> str:
    """Remove leading section numbers ("2.1", "IV.", "A.") and their separators.

    Stripping repeats until nothing more matches; text that is nothing but
    numbering is returned unchanged.
    """
    current = text.strip()
    while True:
        stripped = NUMBERING_RE.sub("", current, count=1).strip()
        if not stripped or stripped == current:
            return current
        current = stripped


def normalize_header(text: str) -> str:
    """Lowercase, numbering-stripped, whitespace-collapsed form of a header."""
    return collapse_whitespace(strip_numbering(collapse_whitespace(text))).lower()


def strip_punctuation(text: str) -> str:
    return _PUNCT_RE.sub(" ", text)


def word_tokens(text: str) -> list[str]:
    """Lowercased ``\\w+`` tokens."""
    return _WORD_RE.findall(text.lower())


def header_similarity(a: str, b: str, score_cutoff: float | None = None) -> float:
    """Normalized Levenshtein similarity of two ``normalize_header`` keys.

    ``1 - distance / max length``; an empty key scores 0. Scores under
    ``score_cutoff`` come back as 0.
    """
    if not a or not b:
        return 0.0
    return float(Levenshtein.normalized_similarity(a, b, score_cutoff=score_cutoff))


def parse_word_list(text: str) -> frozenset[str]:
    """One word per line; blank lines and ``#`` comments are skipped."""
    words = set()
    for raw in text.splitlines():
        word = raw.split("#", 1)[0].strip().lower()
        if word:
            words.add(word)
    return frozenset(words)


@lru_cache(maxsize=8)
def bundled_word_list(name: str) -> frozenset[str]:
    """Load a word list shipped in ``docstruct/data``."""
    text = (DATA_DIR / name).read_text(encoding="utf-8")
    return parse_word_list(text)


def default_stoplist() -> frozenset[str]:
    return bundled_word_list("stoplist.txt")


__all__ = [
    "NUMBERING_RE",
    "collapse_whitespace",
    "strip_numbering",
    "normalize_header",
    "strip_punctuation",
    "word_tokens",
    "header_similarity",
    "parse_word_list",
    "bundled_word_list",
    "default_stoplist",
]
