"""
Summary Service - extractive section summaries with TextRank.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..models.section import TocTree
from ..utils.error_handler import ContractError
from ..utils.text_utils import bundled_word_list, collapse_whitespace, default_stoplist, word_tokens

logger = logging.getLogger(__name__)

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 100

_BOUNDARY_RE = re.compile(r"(?<=[.?!])(?P<close>[\"')\]]*)\s+(?=[\"'(\[]?[A-Z])")


@dataclass
class SentenceGraph:
    """Sentences with their symmetric similarity weights and rank scores."""

    sentences: list[str]
    weights: np.ndarray
    damping: float = DEFAULT_DAMPING
    scores: np.ndarray | None = None
    converged: bool = False
    iterations: int = 0


def default_abbreviations() -> frozenset[str]:
    return bundled_word_list("abbreviations.txt")


def split_sentences(text: str, abbreviations: frozenset[str] | None = None) -> list[str]:
    """Split at ``.``, ``?`` or ``!`` followed by whitespace and an uppercase letter.

    No split happens after a listed abbreviation ("e.g.", "Fig.") or a single
    capital initial.
    """
    abbreviations = default_abbreviations() if abbreviations is None else abbreviations
    text = collapse_whitespace(text)
    if not text:
        return []

    sentences = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        end = match.start() + len(match.group("close"))
        candidate = text[start:end]
        last_word = candidate.rsplit(" ", 1)[-1].lower()
        if last_word.endswith(".") and (
            last_word[:-1] in abbreviations or re.fullmatch(r"[a-z]\.", last_word)
        ):
            continue
        sentences.append(candidate.strip())
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return [s for s in sentences if s]


def sentence_similarity(a: Sequence[str], b: Sequence[str]) -> float:
    """Word overlap normalized by ``ln|a| + ln|b|``; 0 for sentences under two tokens."""
    if len(a) < 2 or len(b) < 2:
        return 0.0
    overlap = len(set(a) & set(b))
    if overlap == 0:
        return 0.0
    return overlap / (math.log(len(a)) + math.log(len(b)))


def sentence_tokens(sentence: str, stoplist: frozenset[str] | None = None) -> list[str]:
    stoplist = default_stoplist() if stoplist is None else stoplist
    return [t for t in word_tokens(sentence) if t not in stoplist]


def build_sentence_graph(
    sentences: Sequence[str],
    damping: float = DEFAULT_DAMPING,
    stoplist: frozenset[str] | None = None,
) -> SentenceGraph:
    tokens = [sentence_tokens(s, stoplist) for s in sentences]
    n = len(sentences)
    weights = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            weights[i, j] = weights[j, i] = sentence_similarity(tokens[i], tokens[j])
    return SentenceGraph(list(sentences), weights, damping)


def textrank_scores(
    g: SentenceGraph,
    damping: float | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """
    Weighted PageRank over the sentence graph.

    Scores start uniform and sum to 1; a sentence without similar sentences
    spreads its score uniformly. Iteration stops once no score moves by
    ``tol`` or more; ``g.converged`` records whether that happened within
    ``max_iter`` iterations.
    """
    n = len(g.sentences)
    if n == 0:
        raise ContractError("TextRank needs at least one sentence")
    d = g.damping if damping is None else damping
    if not 0.0 < d < 1.0:
        raise ContractError(f"damping must be in (0, 1), got {d}")
    W = np.asarray(g.weights, dtype=float)
    if W.shape != (n, n) or (W < 0).any() or not np.allclose(W, W.T):
        raise ContractError("Sentence weights must be a symmetric non-negative matrix")

    out = W.sum(axis=1)
    transition = np.full((n, n), 1.0 / n)
    linked = out > 0
    transition[linked] = W[linked] / out[linked, None]

    scores = np.full(n, 1.0 / n)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        updated = (1.0 - d) / n + d * (transition.T @ scores)
        delta = float(np.abs(updated - scores).max())
        scores = updated
        if delta < tol:
            converged = True
            break
    if not converged:
        logger.warning("TextRank did not converge within %d iterations", max_iter)

    g.damping = d
    g.scores = scores
    g.converged = converged
    g.iterations = iterations
    return scores


def summary_size(n_sentences: int, ratio: float) -> int:
    """``ceil(ratio * n)`` sentences, at least one for nonempty input."""
    if n_sentences == 0:
        return 0
    return max(1, math.ceil(round(ratio * n_sentences, 9)))


class SummaryService:
    """Service for extractive summaries of sections."""

    @staticmethod
    def rank_sentences(
        text: str,
        damping: float = DEFAULT_DAMPING,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
    ) -> SentenceGraph:
        graph = build_sentence_graph(split_sentences(text), damping)
        if graph.sentences:
            textrank_scores(graph, damping, tol, max_iter)
        return graph

    @staticmethod
    def summarize_section(
        text: str,
        ratio: float = 0.2,
        damping: float = DEFAULT_DAMPING,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
    ) -> str:
        """
        Top ``ceil(ratio * N)`` sentences by TextRank score, in original order.

        Args:
            text: Section text
            ratio: Fraction of sentences to keep, in (0, 1]

        Returns:
            Summary text; empty for empty input
        """
        if not 0.0 < ratio <= 1.0:
            raise ContractError(f"ratio must be in (0, 1], got {ratio}")
        graph = SummaryService.rank_sentences(text, damping, tol, max_iter)
        if not graph.sentences:
            return ""
        keep = summary_size(len(graph.sentences), ratio)
        ranked = sorted(range(len(graph.sentences)), key=lambda i: (-graph.scores[i], i))
        chosen = sorted(ranked[:keep])
        return " ".join(graph.sentences[i] for i in chosen)

    @staticmethod
    def summarize_tree(
        tree: TocTree,
        ratio: float = 0.2,
        damping: float = DEFAULT_DAMPING,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
    ) -> int:
        """Fill ``summary`` on every section from its body; returns the sections summarized."""
        count = 0
        for section in tree.iter_sections():
            section.summary = SummaryService.summarize_section(
                section.body_text, ratio, damping, tol, max_iter
            )
            count += bool(section.summary)
        return count


__all__ = [
    "SentenceGraph",
    "SummaryService",
    "build_sentence_graph",
    "default_abbreviations",
    "sentence_similarity",
    "sentence_tokens",
    "split_sentences",
    "summary_size",
    "textrank_scores",
]
