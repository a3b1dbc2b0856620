"""
Topic Service - LDA over section texts with collapsed Gibbs sampling.

This service provides:
- Section tokenization (word, bigram and phrase dictionaries)
- Dictionary construction with section-frequency filtering
- Collapsed Gibbs training, fold-in inference and semantic concepts
- Half-split similarity evaluation and held-out log perplexity
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, NamedTuple

import numpy as np
from scipy.special import gammaln

from ..features.ngrams import ngrams
from ..models.section import TocTree
from ..utils.error_handler import ContractError, ModelFormatError, UsageError
from ..utils.serialization_utils import read_container, write_container
from ..utils.text_utils import default_stoplist, word_tokens

logger = logging.getLogger(__name__)

TOPIC_MAGIC = b"DSTOPIC\x00"
TOPIC_FORMAT_VERSION = 1

NGRAM_MODES: dict[str, tuple[int, int]] = {
    "word": (1, 1),
    "bigram": (2, 2),
    "phrase": (1, 3),
}


@dataclass(frozen=True)
class TopicDictionary:
    """Filtered term dictionary; ids follow lexicographic term order."""

    terms: tuple[str, ...]
    section_frequency: tuple[int, ...]
    n_sections: int
    ids: MappingProxyType = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ids", MappingProxyType({t: i for i, t in enumerate(self.terms)}))

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.ids

    def encode(self, tokens: Sequence[str]) -> list[int]:
        return [self.ids[t] for t in tokens if t in self.ids]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_sections": self.n_sections,
            "section_frequency": list(self.section_frequency),
            "terms": list(self.terms),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TopicDictionary:
        return cls(
            terms=tuple(data["terms"]),
            section_frequency=tuple(int(v) for v in data["section_frequency"]),
            n_sections=int(data["n_sections"]),
        )


class SweepState(NamedTuple):
    """Counts after one Gibbs sweep, passed to ``on_sweep`` hooks."""

    iteration: int
    doc_topic: np.ndarray  # (D, K)
    word_topic: np.ndarray  # (V, K)
    log_likelihood: float


@dataclass
class TopicModel:
    dictionary: TopicDictionary
    K: int
    alpha: float
    beta: float
    word_topic: np.ndarray  # (V, K) token counts per term and topic
    doc_topic: np.ndarray  # (D, K) token counts per training section and topic
    seed: int = 0
    iterations: int = 0
    ngram: str = "word"
    log_likelihood: list[float] = field(default_factory=list)

    @property
    def topic_word_counts(self) -> np.ndarray:
        """(K, V) view of the topic-word counts."""
        return self.word_topic.T

    @property
    def topic_word_distribution(self) -> np.ndarray:
        """Smoothed (K, V) word probabilities per topic."""
        V = len(self.dictionary)
        counts = self.topic_word_counts.astype(float)
        return (counts + self.beta) / (counts.sum(axis=1, keepdims=True) + V * self.beta)

    def doc_topic_distribution(self) -> np.ndarray:
        counts = self.doc_topic.astype(float)
        return (counts + self.alpha) / (counts.sum(axis=1, keepdims=True) + self.K * self.alpha)

    def to_dict(self) -> dict[str, Any]:
        return {
            "K": self.K,
            "alpha": self.alpha,
            "beta": self.beta,
            "dictionary": self.dictionary.to_dict(),
            "doc_topic": self.doc_topic.tolist(),
            "iterations": self.iterations,
            "log_likelihood": list(self.log_likelihood),
            "ngram": self.ngram,
            "seed": self.seed,
            "word_topic": self.word_topic.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TopicModel:
        dictionary = TopicDictionary.from_dict(data["dictionary"])
        K = int(data["K"])
        return cls(
            dictionary=dictionary,
            K=K,
            alpha=float(data["alpha"]),
            beta=float(data["beta"]),
            word_topic=np.array(data["word_topic"], dtype=np.int64).reshape(len(dictionary), K),
            doc_topic=np.array(data["doc_topic"], dtype=np.int64).reshape(-1, K),
            seed=int(data["seed"]),
            iterations=int(data["iterations"]),
            ngram=str(data["ngram"]),
            log_likelihood=[float(v) for v in data["log_likelihood"]],
        )


@dataclass(frozen=True)
class ChunkSimilarity:
    chunk: int
    sections: int
    intra: float
    inter: float


@dataclass(frozen=True)
class HalfSplitReport:
    chunks: list[ChunkSimilarity]
    skipped: int = 0

    @property
    def mean_intra(self) -> float:
        return float(np.nanmean([c.intra for c in self.chunks]))

    @property
    def mean_inter(self) -> float:
        return float(np.nanmean([c.inter for c in self.chunks]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "chunks": [
                {"chunk": c.chunk, "inter": c.inter, "intra": c.intra, "sections": c.sections}
                for c in self.chunks
            ],
            "skipped": self.skipped,
        }


def _joint_log_likelihood(
    doc_topic: np.ndarray, word_topic: np.ndarray, alpha: float, beta: float
) -> float:
    """log p(w, z) of the current assignment with multinomials integrated out."""
    V, K = word_topic.shape
    D = doc_topic.shape[0]
    topic_totals = word_topic.sum(axis=0)
    doc_totals = doc_topic.sum(axis=1)
    log_pw = K * (gammaln(V * beta) - V * gammaln(beta)) + float(
        gammaln(word_topic + beta).sum() - gammaln(topic_totals + V * beta).sum()
    )
    log_pz = D * (gammaln(K * alpha) - K * gammaln(alpha)) + float(
        gammaln(doc_topic + alpha).sum() - gammaln(doc_totals + K * alpha).sum()
    )
    return float(log_pw + log_pz)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.dot(a, b) / denom) if denom > 0 else 0.0


class TopicService:
    """Service for topic modeling of sections."""

    @staticmethod
    def tokenize_section(
        text: str, ngram: str = "word", stoplist: frozenset[str] | None = None
    ) -> list[str]:
        """Lowercased alphabetic tokens without stopwords, as words, bigrams or phrases."""
        if ngram not in NGRAM_MODES:
            raise ContractError(f"Unknown n-gram mode {ngram!r}; expected one of {tuple(NGRAM_MODES)}")
        stoplist = default_stoplist() if stoplist is None else stoplist
        tokens = [t for t in word_tokens(text) if t.isalpha() and len(t) > 1 and t not in stoplist]
        return ngrams(tokens, NGRAM_MODES[ngram])

    @staticmethod
    def build_dictionary(
        sections: Sequence[Sequence[str]],
        min_sections: int = 20,
        max_fraction: float = 0.10,
        cap: int = 100000,
    ) -> TopicDictionary:
        """
        Keep terms found in at least ``min_sections`` sections and at most
        ``max_fraction`` of them, then the ``cap`` most frequent (ties lexicographic).
        """
        if not 0.0 < max_fraction <= 1.0:
            raise ContractError(f"max_fraction must be in (0, 1], got {max_fraction}")
        df: Counter[str] = Counter()
        for tokens in sections:
            df.update(set(tokens))
        limit = max_fraction * len(sections)
        kept = [(t, n) for t, n in df.items() if min_sections <= n <= limit]
        kept.sort(key=lambda item: (-item[1], item[0]))
        kept = sorted(kept[:cap])
        if not kept:
            logger.warning("Topic dictionary is empty after filtering %d terms", len(df))
        logger.info("Topic dictionary: %d of %d terms over %d sections", len(kept), len(df), len(sections))
        return TopicDictionary(
            terms=tuple(t for t, _ in kept),
            section_frequency=tuple(n for _, n in kept),
            n_sections=len(sections),
        )

    @staticmethod
    def train_lda(
        sections: Sequence[Sequence[str]],
        dictionary: TopicDictionary,
        K: int = 10,
        alpha: float | None = None,
        beta: float = 0.01,
        iterations: int = 500,
        seed: int = 0,
        ngram: str = "word",
        on_sweep: Callable[[SweepState], None] | None = None,
    ) -> TopicModel:
        """
        Collapsed Gibbs sampling.

        Each token's topic is resampled from
        ``(n_dk + alpha) * (n_kw + beta) / (n_k + V * beta)``. The corpus
        log-likelihood is recorded after every sweep.

        Args:
            sections: Token lists, one per section
            dictionary: Terms to model; other tokens are dropped
            K: Number of topics
            alpha: Document-topic prior, 50/K when not given
            beta: Topic-word prior
            iterations: Gibbs sweeps
            seed: Seed of the sampler
            ngram: Tokenization mode the sections were produced with
            on_sweep: Called with the counts after every sweep

        Returns:
            Trained TopicModel
        """
        if K < 1:
            raise ContractError(f"K must be >= 1, got {K}")
        alpha = 50.0 / K if alpha is None else alpha
        docs = [np.array(dictionary.encode(tokens), dtype=np.int64) for tokens in sections]
        n_tokens = sum(len(d) for d in docs)
        if n_tokens == 0:
            raise ContractError("All sections are empty after dictionary filtering")

        V = len(dictionary)
        rng = np.random.default_rng(seed)
        doc_topic = np.zeros((len(docs), K), dtype=np.int64)
        word_topic = np.zeros((V, K), dtype=np.int64)
        assignments = [rng.integers(0, K, size=len(d)) for d in docs]
        for d, (words, topics) in enumerate(zip(docs, assignments, strict=True)):
            np.add.at(doc_topic[d], topics, 1)
            np.add.at(word_topic, (words, topics), 1)
        topic_totals = word_topic.sum(axis=0).astype(float)
        v_beta = V * beta

        trace: list[float] = []
        for iteration in range(iterations):
            uniforms = rng.random(n_tokens)
            u = 0
            for d, words in enumerate(docs):
                topics = assignments[d]
                nd = doc_topic[d]
                for i, w in enumerate(words):
                    k = topics[i]
                    nd[k] -= 1
                    word_topic[w, k] -= 1
                    topic_totals[k] -= 1

                    p = (nd + alpha) * (word_topic[w] + beta) / (topic_totals + v_beta)
                    cumulative = np.cumsum(p)
                    k = min(int(np.searchsorted(cumulative, uniforms[u] * cumulative[-1], side="right")), K - 1)
                    u += 1

                    topics[i] = k
                    nd[k] += 1
                    word_topic[w, k] += 1
                    topic_totals[k] += 1

            ll = _joint_log_likelihood(doc_topic, word_topic, alpha, beta)
            trace.append(ll)
            if on_sweep is not None:
                on_sweep(SweepState(iteration, doc_topic, word_topic, ll))
            if (iteration + 1) % 50 == 0:
                logger.debug("Gibbs sweep %d/%d: log-likelihood %.2f", iteration + 1, iterations, ll)

        logger.info("Trained LDA: K=%d, V=%d, %d tokens, %d sweeps", K, V, n_tokens, iterations)
        return TopicModel(
            dictionary=dictionary,
            K=K,
            alpha=alpha,
            beta=beta,
            word_topic=word_topic,
            doc_topic=doc_topic,
            seed=seed,
            iterations=iterations,
            ngram=ngram,
            log_likelihood=trace,
        )

    @staticmethod
    def infer_topics(
        m: TopicModel, tokens: Sequence[str], iterations: int = 50, seed: int = 0
    ) -> np.ndarray:
        """
        Fold-in Gibbs sampling with frozen topic-word counts.

        A section without in-dictionary tokens gets the uniform distribution.
        The sampler is seeded afresh on every call.
        """
        words = np.array(m.dictionary.encode(tokens), dtype=np.int64)
        if words.size == 0:
            logger.info("Section has no in-dictionary tokens; returning the uniform distribution")
            return np.full(m.K, 1.0 / m.K)

        phi = m.topic_word_distribution.T  # (V, K)
        rng = np.random.default_rng(seed)
        topics = rng.integers(0, m.K, size=words.size)
        nd = np.bincount(topics, minlength=m.K).astype(np.int64)
        for _ in range(iterations):
            uniforms = rng.random(words.size)
            for i, w in enumerate(words):
                nd[topics[i]] -= 1
                cumulative = np.cumsum((nd + m.alpha) * phi[w])
                k = min(int(np.searchsorted(cumulative, uniforms[i] * cumulative[-1], side="right")), m.K - 1)
                topics[i] = k
                nd[k] += 1
        return (nd + m.alpha) / (words.size + m.K * m.alpha)

    @staticmethod
    def top_terms(m: TopicModel, n: int = 10) -> list[list[tuple[str, float]]]:
        """The ``n`` most probable terms of every topic, ties lexicographic."""
        phi = m.topic_word_distribution
        terms = m.dictionary.terms
        result = []
        for k in range(m.K):
            order = sorted(range(len(terms)), key=lambda t: (-phi[k, t], terms[t]))
            result.append([(terms[t], float(phi[k, t])) for t in order[: max(n, 0)]])
        return result

    @staticmethod
    def semantic_concepts(
        m: TopicModel,
        tokens: Sequence[str],
        n_terms: int = 3,
        iterations: int = 50,
        seed: int = 0,
    ) -> list[str]:
        """Top terms of the section's most probable topic.

        Sections without in-dictionary tokens get no concepts.
        """
        if n_terms <= 0 or not m.dictionary.encode(tokens):
            return []
        theta = TopicService.infer_topics(m, tokens, iterations, seed)
        topic = int(np.argmax(theta))
        return [term for term, _ in TopicService.top_terms(m, n_terms)[topic]]

    @staticmethod
    def annotate_tree(
        tree: TocTree,
        m: TopicModel,
        n_terms: int = 3,
        iterations: int = 50,
        seed: int = 0,
        stoplist: frozenset[str] | None = None,
    ) -> None:
        """Fill ``concepts`` on every section of ``tree``."""
        for section in tree.iter_sections():
            tokens = TopicService.tokenize_section(section.text, m.ngram, stoplist)
            section.concepts = TopicService.semantic_concepts(m, tokens, n_terms, iterations, seed)

    @staticmethod
    def half_split_similarity_eval(
        m: TopicModel,
        sections: Sequence[Sequence[str]],
        chunks: int = 10,
        seed: int = 0,
        iterations: int = 50,
    ) -> HalfSplitReport:
        """
        Compare topic distributions of section halves, chunk by chunk.

        ``intra`` is the cosine between the two halves of the same section,
        ``inter`` between the first half of one section and the second half
        of another (seeded pairing within the chunk). Sections with fewer than
        two in-dictionary tokens are skipped.
        """
        usable = [
            [t for t in tokens if t in m.dictionary] for tokens in sections
        ]
        kept = [tokens for tokens in usable if len(tokens) >= 2]
        skipped = len(usable) - len(kept)
        if skipped:
            logger.info("Skipped %d sections shorter than two tokens", skipped)
        if chunks < 1 or len(kept) < chunks:
            raise ContractError(f"Cannot split {len(kept)} usable sections into {chunks} nonempty chunks")

        rng = np.random.default_rng(seed)
        results = []
        for c, idx in enumerate(np.array_split(np.arange(len(kept)), chunks)):
            halves = []
            for i in idx:
                tokens = kept[i]
                mid = len(tokens) // 2
                halves.append(
                    (
                        TopicService.infer_topics(m, tokens[:mid], iterations, seed),
                        TopicService.infer_topics(m, tokens[mid:], iterations, seed),
                    )
                )
            intra = [_cosine(first, second) for first, second in halves]
            if len(halves) >= 2:
                order = rng.permutation(len(halves))
                inter = [
                    _cosine(halves[order[j]][0], halves[order[(j + 1) % len(order)]][1])
                    for j in range(len(order))
                ]
                inter_mean = float(np.mean(inter))
            else:
                inter_mean = float("nan")
            results.append(ChunkSimilarity(c, len(halves), float(np.mean(intra)), inter_mean))
        return HalfSplitReport(results, skipped)

    @staticmethod
    def log_likelihood_per_token(
        m: TopicModel, sections: Sequence[Sequence[str]], thetas: Sequence[np.ndarray]
    ) -> float:
        """Mean per-token log p(w) = log(theta . phi_w) for given topic mixtures."""
        phi = m.topic_word_distribution
        total, count = 0.0, 0
        for tokens, theta in zip(sections, thetas, strict=True):
            words = m.dictionary.encode(tokens)
            if not words:
                continue
            total += float(np.log(np.asarray(theta) @ phi[:, words]).sum())
            count += len(words)
        if count == 0:
            raise ContractError("Held-out sections contain no in-dictionary tokens")
        return total / count

    @staticmethod
    def log_perplexity(
        m: TopicModel,
        sections: Sequence[Sequence[str]],
        iterations: int = 50,
        seed: int = 0,
    ) -> float:
        """Per-token held-out log-likelihood with fold-in topic mixtures (negative; closer to 0 is better)."""
        if not sections:
            raise ContractError("Held-out set is empty")
        thetas = [TopicService.infer_topics(m, tokens, iterations, seed) for tokens in sections]
        return TopicService.log_likelihood_per_token(m, sections, thetas)

    @staticmethod
    def save_model(m: TopicModel, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as sink:
            write_container(sink, TOPIC_MAGIC, TOPIC_FORMAT_VERSION, m.to_dict())

    @staticmethod
    def load_model(path: str | Path) -> TopicModel:
        path = Path(path)
        if not path.exists():
            raise UsageError(f"Topic model not found: {path}")
        with path.open("rb") as source:
            body = read_container(source, TOPIC_MAGIC, TOPIC_FORMAT_VERSION)
        try:
            return TopicModel.from_dict(body)
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"Topic model body is invalid: {e!r}") from e


__all__ = [
    "NGRAM_MODES",
    "TopicDictionary",
    "TopicModel",
    "SweepState",
    "ChunkSimilarity",
    "HalfSplitReport",
    "TopicService",
]
