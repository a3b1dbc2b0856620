"""
The sixteen human-designed layout features of a text line.

Every layout comparison is made against the line's page averages, so
scaling all coordinates and font sizes of a page leaves the features
unchanged.
"""

from __future__ import annotations

import math
import re
from collections.abc import Sequence
from typing import NamedTuple, Protocol

from ..models.document import BOLD_WEIGHT, LineRecord, PageStats
from ..utils.text_utils import bundled_word_list, strip_numbering, strip_punctuation, word_tokens
from .vector import N_LAYOUT, FeatureVector
from .vocabulary import HeaderVocabulary

NOUN = "NOUN"
VERB = "VERB"
OTHER = "OTHER"

# A gap counts as "higher" above this multiple of the page's average spacing.
HIGHER_SPACE_FACTOR = 1.2

SHORT_TEXT = 40
MEDIUM_TEXT = 90

NUMBER_DOT_RE = re.compile(r"^\d+(\.\d+)*\.?\s")
SEQ_NUMBER_RE = re.compile(
    r"^\s*(?:\(?\d|(?:[IVXLC]+|[ivxlc]+)[.):]|[IVXLC]+\s|\(?[A-Za-z][.):])"
)
_DOTTED_NUMBER_RE = re.compile(r"^\s*\(?(\d+(?:\.\d+)*)\.?(?:[\s):]|$)")
_LETTER_NUMBER_RE = re.compile(r"^\s*[A-Z]((?:\.\d+)+)\.?(?:\s|$)")
_ROMAN_NUMBER_RE = re.compile(r"^\s*[IVXLC]+\.(?:\s|$)")
_ALPHA_TOKEN_RE = re.compile(r"[^\W\d_][\w'-]*", re.UNICODE)

_NOUN_SUFFIXES = ("tion", "ment", "ness", "ity")
_VERB_SUFFIXES = ("ing", "ed")
_STYLE_MARKERS = ("bold", "italic", "oblique", "black", "heavy", "semibold", "demi")


class PosTagger(Protocol):
    """Tags tokens as ``NOUN``, ``VERB`` or ``OTHER``."""

    def tag(self, tokens: Sequence[str]) -> list[str]: ...


class HeuristicTagger:
    """Rule-based tagger.

    Nouns: a capitalized word that does not open the sentence, a word with a
    nominal suffix (-tion, -ment, -ness, -ity) or a header-vocabulary word.
    Verbs: a bundled verb/auxiliary list, or a lowercase word ending in
    -ing/-ed.
    """

    def __init__(
        self,
        vocabulary: frozenset[str] = frozenset(),
        verbs: frozenset[str] | None = None,
    ):
        self.vocabulary = vocabulary
        self.verbs = bundled_word_list("verbs.txt") if verbs is None else verbs

    def tag(self, tokens: Sequence[str]) -> list[str]:
        tags = []
        for i, token in enumerate(tokens):
            lowered = token.lower()
            if lowered in self.verbs:
                tags.append(VERB)
            elif (
                (i > 0 and token[:1].isupper())
                or lowered.endswith(_NOUN_SUFFIXES)
                or lowered in self.vocabulary
            ):
                tags.append(NOUN)
            elif token.islower() and len(token) > 4 and token.endswith(_VERB_SUFFIXES):
                tags.append(VERB)
            else:
                tags.append(OTHER)
        return tags


class LineContext(NamedTuple):
    """Neighbouring lines in reading order; ``None`` at the page edge."""

    previous: LineRecord | None
    next: LineRecord | None


def numbering_depth(text: str) -> int:
    """Depth of a leading section number: "2" -> 1, "2.3" -> 2, "A.1" -> 2, "IV." -> 1."""
    match = _DOTTED_NUMBER_RE.match(text)
    if match:
        return match.group(1).count(".") + 1
    match = _LETTER_NUMBER_RE.match(text)
    if match:
        return match.group(1).count(".") + 1
    if _ROMAN_NUMBER_RE.match(text):
        return 1
    return 0


def alpha_tokens(text: str) -> list[str]:
    return _ALPHA_TOKEN_RE.findall(text)


def _gap(line: LineRecord, other: LineRecord | None, below: bool) -> float:
    if other is None or other.page_number != line.page_number:
        return math.inf
    return (other.baseline - line.baseline) if below else (line.baseline - other.baseline)


def extract_layout_features(
    line: LineRecord,
    context: LineContext,
    stats: PageStats,
    vocab: HeaderVocabulary,
    tagger: PosTagger | None = None,
) -> FeatureVector:
    """Compute the 16 layout features of ``line`` (see ``LAYOUT_FEATURES``)."""
    tagger = tagger or HeuristicTagger(vocab.terms)
    threshold = HIGHER_SPACE_FACTOR * stats.avg_line_spacing
    higher_above = _gap(line, context.previous, below=False) > threshold
    higher_below = _gap(line, context.next, below=True) > threshold

    family = line.font_family.lower()
    values = [0.0] * N_LAYOUT
    values[2] = float(line.font_weight > stats.avg_font_weight)
    values[3] = float(
        line.font_weight >= BOLD_WEIGHT or any(marker in family for marker in _STYLE_MARKERS)
    )
    values[5] = float(higher_above and higher_below)

    text = line.text.strip()
    if not text:
        return FeatureVector(layout=tuple(values))

    body = strip_numbering(text)
    tokens = alpha_tokens(body)
    tags = tagger.tag(tokens)
    nouns = sum(1 for t in tags if t == NOUN)
    has_verb = any(t == VERB for t in tags)

    values[0] = float(bool(tokens) and nouns / len(tokens) > 0.5)
    values[1] = float(not has_verb and higher_below)
    leading = body.split()[:3]
    values[4] = float(len(leading) == 3 and all(t[:1].isupper() for t in leading))
    values[6] = float(bool(NUMBER_DOT_RE.match(text)))
    values[7] = 0.0 if len(text) <= SHORT_TEXT else (0.5 if len(text) <= MEDIUM_TEXT else 1.0)
    values[8] = float(bool(SEQ_NUMBER_RE.match(text)))
    values[9] = float(text.endswith(":"))

    depth = numbering_depth(text)
    if depth >= 1:
        values[10 + min(depth, 3) - 1] = 1.0

    if tokens:
        upper_initial = sum(1 for t in tokens if t[:1].isupper())
        values[13] = float(upper_initial / len(tokens) >= 0.75)
    letters = [c for c in text if c.isalpha()]
    values[14] = float(bool(letters) and all(c.isupper() for c in letters))
    values[15] = float(any(w in vocab.terms for w in word_tokens(strip_punctuation(text))))
    return FeatureVector(layout=tuple(values))


def document_contexts(lines: Sequence[LineRecord]) -> list[LineContext]:
    """Previous/next neighbours for every line of a document in reading order."""
    contexts = []
    for i, line in enumerate(lines):
        previous = lines[i - 1] if i > 0 else None
        following = lines[i + 1] if i + 1 < len(lines) else None
        if previous is not None and previous.page_number != line.page_number:
            previous = None
        if following is not None and following.page_number != line.page_number:
            following = None
        contexts.append(LineContext(previous, following))
    return contexts


__all__ = [
    "NOUN",
    "VERB",
    "OTHER",
    "HIGHER_SPACE_FACTOR",
    "NUMBER_DOT_RE",
    "SEQ_NUMBER_RE",
    "PosTagger",
    "HeuristicTagger",
    "LineContext",
    "numbering_depth",
    "alpha_tokens",
    "extract_layout_features",
    "document_contexts",
]
