"""
Semantic Service - ontology labels, section order and annotation triples.

This service provides:
- Count-based discovery of frequent section headers
- Alias-based mapping of headers onto ontology classes
- A learned section classifier over word n-grams (SemanticClassifier)
- A first-order section sequence model with canonical ordering
- Ontology annotation as an rdflib graph and sorted N-Triples
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any
from urllib.parse import quote

import numpy as np
from rdflib import RDF, Graph, Literal, Namespace, URIRef

from ..classifiers.metrics import EvalReport, evaluate
from ..classifiers.model import Model, model_from_dict, model_to_dict, predict, train
from ..features.ngrams import NgramVectorizer, fit_ngram_vectorizer, vectorize_text
from ..models.dataset import LabeledDataset
from ..models.ontology import UNKNOWN_SECTION, OntologyClassSet, ontology_from_dict
from ..models.section import SectionNode, TocTree
from ..utils.error_handler import ContractError, ModelFormatError, UsageError
from ..utils.serialization_utils import read_container, write_container
from ..utils.text_utils import normalize_header, word_tokens

logger = logging.getLogger(__name__)

DS = Namespace("urn:docstruct:ontology#")
DOC_PREFIX = "urn:docstruct:doc:"

SEMANTIC_MAGIC = b"DSSEMCL\x00"
SEMANTIC_FORMAT_VERSION = 1
SEQUENCE_MAGIC = b"DSSEQML\x00"
SEQUENCE_FORMAT_VERSION = 1

START = "<s>"
END = "</s>"
PAD = "<pad>"

EXHAUSTIVE_ORDER_LIMIT = 8
ALIAS_OVERLAP = 0.5


def _match_key(text: str) -> str:
    return " ".join(word_tokens(normalize_header(text)))


def truncate_words(text: str, truncation: int) -> str:
    """The first ``truncation`` word tokens of ``text``, space-joined."""
    return " ".join(word_tokens(text)[:truncation])


@dataclass(frozen=True)
class SemanticPrediction:
    ontology_class: str
    score: float
    source: str  # "model" or "alias"
    scores: dict[str, float] | None = None


class SemanticClassifier:
    """Word n-gram classifier over the classes of an ontology."""

    def __init__(
        self,
        ontology: OntologyClassSet,
        vectorizer: NgramVectorizer,
        model: Model,
        truncation: int = 200,
    ):
        self.ontology = ontology
        self.vectorizer = vectorizer
        self.model = model
        self.truncation = truncation

    def vector(self, text: str) -> np.ndarray:
        row = np.zeros(len(self.vectorizer))
        for term_id, weight in vectorize_text(self.vectorizer, truncate_words(text, self.truncation)).items():
            row[term_id] = weight
        return row

    def dataset(self, examples: Sequence[tuple[str, str]]) -> LabeledDataset:
        """(text, class) examples as a dataset over this model's classes.

        Examples of classes the model was not trained on are dropped.
        """
        alphabet = set(self.model.class_alphabet)
        rows, labels = [], []
        dropped = 0
        for text, class_name in examples:
            index = self.ontology.index(class_name) if class_name in self.ontology.classes else -1
            if index not in alphabet:
                dropped += 1
                continue
            rows.append(self.vector(text))
            labels.append(index)
        if dropped:
            logger.info("Dropped %d examples of classes unknown to the semantic model", dropped)
        X = np.array(rows) if rows else np.zeros((0, len(self.vectorizer)))
        return LabeledDataset(X, np.array(labels, dtype=np.int64), self.model.class_alphabet, mode="text")

    @classmethod
    def fit(
        cls,
        examples: Sequence[tuple[str, str]],
        ontology: OntologyClassSet,
        kind: str = "nb",
        truncation: int = 200,
        n_range: tuple[int, int] = (1, 2),
        min_df: int = 2,
        max_features: int | None = None,
        seed: int = 0,
        hyperparams: dict[str, Any] | None = None,
    ) -> SemanticClassifier:
        """Train on (section text, class name) examples."""
        known = [(text, c) for text, c in examples if c in ontology.classes]
        if len(known) < len(examples):
            logger.warning("Ignoring %d examples with classes outside %s", len(examples) - len(known), ontology.name)
        texts = [truncate_words(text, truncation) for text, _ in known]
        vectorizer = fit_ngram_vectorizer(texts, n_range=n_range, min_df=min_df, max_features=max_features)

        alphabet = tuple(sorted({ontology.index(c) for _, c in known}))
        X = np.zeros((len(texts), len(vectorizer)))
        for row, text in enumerate(texts):
            for term_id, weight in vectorize_text(vectorizer, text).items():
                X[row, term_id] = weight
        y = np.array([ontology.index(c) for _, c in known], dtype=np.int64)
        ds = LabeledDataset(X, y, alphabet, mode="text")
        model = train(kind, ds, hyperparams, seed=seed)
        logger.info(
            "Trained semantic classifier on %d sections over %d classes", len(known), len(alphabet)
        )
        return cls(ontology, vectorizer, model, truncation)

    def predict_text(self, text: str) -> tuple[str, dict[str, float]] | None:
        x = self.vector(text)
        if not x.any():
            return None
        label, scores = predict(self.model, x)
        named = {
            self.ontology.classes[c]: float(s)
            for c, s in zip(self.model.class_alphabet, scores, strict=True)
        }
        return self.ontology.classes[label], named

    def classify(self, section: SectionNode) -> SemanticPrediction | None:
        """Model prediction over header + body, falling back to the alias map.

        Sections without body words, or whose words are all outside the
        model's vocabulary, are classified from the header alias alone.
        """
        if word_tokens(section.body_text):
            predicted = self.predict_text(section.text)
            if predicted is not None:
                name, scores = predicted
                return SemanticPrediction(name, scores[name], "model", scores)

        alias_class = SemanticService.map_header_to_class(section.title, self.ontology)
        if alias_class is not None:
            return SemanticPrediction(alias_class, 1.0, "alias")
        logger.info("No semantic class for section %r: no usable text and no alias", section.title)
        return None

    def evaluate(self, examples: Sequence[tuple[str, str]]) -> EvalReport:
        return evaluate(self.model, self.dataset(examples))

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": model_to_dict(self.model),
            "ontology": self.ontology.to_dict(),
            "truncation": self.truncation,
            "vectorizer": self.vectorizer.to_dict(),
        }

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as sink:
            write_container(sink, SEMANTIC_MAGIC, SEMANTIC_FORMAT_VERSION, self.to_dict())

    @classmethod
    def load(cls, path: str | Path) -> SemanticClassifier:
        path = Path(path)
        if not path.exists():
            raise UsageError(f"Semantic model not found: {path}")
        with path.open("rb") as source:
            body = read_container(source, SEMANTIC_MAGIC, SEMANTIC_FORMAT_VERSION)
        try:
            return cls(
                ontology=ontology_from_dict(body["ontology"]),
                vectorizer=NgramVectorizer.from_dict(body["vectorizer"]),
                model=model_from_dict(body["model"]),
                truncation=int(body["truncation"]),
            )
        except (KeyError, TypeError, ValueError, ContractError) as e:
            raise ModelFormatError(f"Semantic model body is invalid: {e!r}") from e


class SequenceModel:
    """First-order Markov model over section classes with add-one smoothing.

    Rows are the start marker followed by the classes, columns the classes
    followed by the end marker. Padding is representational only: it is part
    of ``label_alphabet`` but never counted as a transition.
    """

    def __init__(self, classes: Sequence[str], max_length: int = 15, counts: np.ndarray | None = None):
        if max_length < 1:
            raise ContractError(f"max_length must be >= 1, got {max_length}")
        self.classes = tuple(classes)
        self.max_length = max_length
        size = len(self.classes) + 1
        self.counts = np.zeros((size, size), dtype=np.int64) if counts is None else np.asarray(counts, dtype=np.int64)
        if self.counts.shape != (size, size):
            raise ContractError(f"Transition counts must be {size}x{size}, got {self.counts.shape}")
        self._index = {c: i for i, c in enumerate(self.classes)}

    @property
    def label_alphabet(self) -> tuple[str, ...]:
        return (START, *self.classes, END, PAD)

    @cached_property
    def log_probs(self) -> np.ndarray:
        smoothed = self.counts + 1.0
        return np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))

    def _indices(self, seq: Sequence[str]) -> list[int]:
        try:
            return [self._index[label] for label in seq]
        except KeyError as e:
            raise ContractError(f"Label {e.args[0]!r} is not a section class") from e

    @classmethod
    def fit(
        cls, corpus: Sequence[Sequence[str]], classes: Sequence[str], max_length: int = 15
    ) -> SequenceModel:
        """Count transitions over sequences truncated to ``max_length``."""
        model = cls(classes, max_length)
        end = len(model.classes)
        for seq in corpus:
            idx = model._indices(list(seq)[:max_length])
            rows = [0] + [i + 1 for i in idx]
            cols = idx + [end]
            np.add.at(model.counts, (rows, cols), 1)
        logger.debug("Fitted sequence model on %d sequences", len(corpus))
        return model

    def transition_log_prob(self, source: str, target: str) -> float:
        """log P(target | source); ``source`` may be START, ``target`` END."""
        row = 0 if source == START else self._indices([source])[0] + 1
        col = len(self.classes) if target == END else self._indices([target])[0]
        return float(self.log_probs[row, col])

    def path_log_prob(self, seq: Sequence[str], from_start: bool = True, to_end: bool = True) -> float:
        idx = self._indices(seq)
        lp = self.log_probs
        if not idx:
            return float(lp[0, len(self.classes)]) if (from_start and to_end) else 0.0
        rows = [i + 1 for i in idx[:-1]]
        total = float(lp[rows, idx[1:]].sum()) if rows else 0.0
        if from_start:
            total += float(lp[0, idx[0]])
        if to_end:
            total += float(lp[idx[-1] + 1, len(self.classes)])
        return total

    def score(self, seq: Sequence[str]) -> float:
        """Log-probability of ``seq`` including the start and end transitions."""
        return self.path_log_prob(seq, True, True)

    def canonical_order(self, labels: Sequence[str]) -> list[str]:
        """The highest-scoring permutation of the multiset ``labels``.

        Exhaustive up to 8 labels, greedy insertion beyond. Ties keep the
        permutation reached first from the labels sorted by class index.
        """
        ordered = sorted(labels, key=lambda label: self._indices([label])[0])
        if len(ordered) <= 1:
            return ordered

        if len(ordered) <= EXHAUSTIVE_ORDER_LIMIT:
            best, best_score = None, -np.inf
            seen: set[tuple[str, ...]] = set()
            for perm in itertools.permutations(ordered):
                if perm in seen:
                    continue
                seen.add(perm)
                score = self.score(perm)
                if score > best_score:
                    best, best_score = list(perm), score
            return best

        sequence: list[str] = []
        for label in ordered:
            candidates = [sequence[:i] + [label] + sequence[i:] for i in range(len(sequence) + 1)]
            scores = [self.score(c) for c in candidates]
            sequence = candidates[int(np.argmax(scores))]
        return sequence

    def to_dict(self) -> dict[str, Any]:
        return {"classes": list(self.classes), "counts": self.counts.tolist(), "max_length": self.max_length}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SequenceModel:
        return cls(data["classes"], int(data["max_length"]), np.array(data["counts"], dtype=np.int64))

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as sink:
            write_container(sink, SEQUENCE_MAGIC, SEQUENCE_FORMAT_VERSION, self.to_dict())

    @classmethod
    def load(cls, path: str | Path) -> SequenceModel:
        path = Path(path)
        if not path.exists():
            raise UsageError(f"Sequence model not found: {path}")
        with path.open("rb") as source:
            body = read_container(source, SEQUENCE_MAGIC, SEQUENCE_FORMAT_VERSION)
        try:
            return cls.from_dict(body)
        except (KeyError, TypeError, ValueError, ContractError) as e:
            raise ModelFormatError(f"Sequence model body is invalid: {e!r}") from e


class SemanticService:
    """Service for semantic section labeling."""

    @staticmethod
    def discover_classes_count_based(headers: Sequence[str]) -> list[tuple[str, int]]:
        """
        Rank normalized headers by frequency.

        Args:
            headers: Raw header strings

        Returns:
            (normalized header, count) pairs, count descending then lexicographic
        """
        counts = Counter(key for key in (normalize_header(h) for h in headers) if key)
        return sorted(counts.items(), key=lambda item: (-item[1], item[0]))

    @staticmethod
    def suggest_aliases(
        headers: Sequence[str], ont: OntologyClassSet, min_count: int = 2
    ) -> list[tuple[str, int, str | None]]:
        """Frequent headers with the class they currently map to, for alias curation."""
        return [
            (header, count, SemanticService.map_header_to_class(header, ont))
            for header, count in SemanticService.discover_classes_count_based(headers)
            if count >= min_count
        ]

    @staticmethod
    def map_header_to_class(header: str, ont: OntologyClassSet) -> str | None:
        """
        Map a header onto an ontology class through the alias map.

        Exact alias match first, then the longest alias contained as whole
        words, then the best token-set overlap (Jaccard >= 0.5). Ties go to
        the lexicographically smaller alias.
        """
        key = _match_key(header)
        if not key:
            return None
        alias_keys = sorted((_match_key(alias), target) for alias, target in ont.aliases.items())
        alias_keys = [(k, target) for k, target in alias_keys if k]

        for alias, target in alias_keys:
            if alias == key:
                return target

        padded = f" {key} "
        contained = [(alias, target) for alias, target in alias_keys if f" {alias} " in padded]
        if contained:
            return min(contained, key=lambda item: (-len(item[0]), item[0]))[1]

        tokens = set(key.split())
        best: tuple[float, str, str] | None = None
        for alias, target in alias_keys:
            alias_tokens = set(alias.split())
            overlap = len(tokens & alias_tokens) / len(tokens | alias_tokens)
            if overlap >= ALIAS_OVERLAP and (best is None or overlap > best[0]):
                best = (overlap, alias, target)
        return best[2] if best is not None else None

    @staticmethod
    def classify_section_semantic(
        section: SectionNode, classifier: SemanticClassifier, truncation: int | None = None
    ) -> SemanticPrediction | None:
        """Classify one section from its first ``truncation`` words."""
        if truncation is not None and truncation != classifier.truncation:
            classifier = SemanticClassifier(classifier.ontology, classifier.vectorizer, classifier.model, truncation)
        return classifier.classify(section)

    @staticmethod
    def training_examples(trees: Sequence[TocTree], ont: OntologyClassSet) -> list[tuple[str, str]]:
        """(section text, class) pairs for sections whose header maps through the alias map."""
        examples = []
        for tree in trees:
            for section in tree.iter_sections():
                target = SemanticService.map_header_to_class(section.title, ont)
                if target is not None:
                    examples.append((section.text, target))
        return examples

    @staticmethod
    def label_tree(
        tree: TocTree,
        ont: OntologyClassSet,
        classifier: SemanticClassifier | None = None,
    ) -> int:
        """Fill ``ontology_class`` on every section; returns how many got a class."""
        labeled = 0
        for section in tree.iter_sections():
            if classifier is not None:
                prediction = classifier.classify(section)
                section.ontology_class = prediction.ontology_class if prediction else None
            else:
                section.ontology_class = SemanticService.map_header_to_class(section.title, ont)
            labeled += section.ontology_class is not None
        return labeled

    @staticmethod
    def fit_sequence_model(
        corpus: Sequence[Sequence[str]], ont: OntologyClassSet, max_length: int = 15
    ) -> SequenceModel:
        return SequenceModel.fit(corpus, ont.classes, max_length)

    @staticmethod
    def section_sequence(tree: TocTree) -> list[str]:
        """Classes of the top-level sections in document order, unclassified ones skipped."""
        return [root.ontology_class for root in tree.roots if root.ontology_class is not None]

    @staticmethod
    def reorder_sections(tree: TocTree, m: SequenceModel) -> list[SectionNode]:
        """Top-level sections in the model's canonical order.

        Sections without a known class keep their relative order at the end.
        The tree itself is not modified.
        """
        known = [root for root in tree.roots if root.ontology_class in m.classes]
        rest = [root for root in tree.roots if root.ontology_class not in m.classes]
        pending: dict[str, list[SectionNode]] = {}
        for root in known:
            pending.setdefault(root.ontology_class, []).append(root)
        order = m.canonical_order([root.ontology_class for root in known])
        return [pending[label].pop(0) for label in order] + rest

    @staticmethod
    def emit_ontology_annotation(tree: TocTree, ont: OntologyClassSet) -> Graph:
        """
        Annotation graph of a section tree.

        One ``rdf:type`` triple for the document, and per section (pre-order)
        an ``rdf:type`` class triple, a ``hasSection`` triple from the
        document, one ``hasConcept`` literal per distinct concept and a
        ``followedBy`` link to the next section.
        """
        graph = Graph()
        graph.bind("ds", DS)
        doc = URIRef(DOC_PREFIX + quote(tree.doc_id, safe=""))
        graph.add((doc, RDF.type, DS.Document))

        previous = None
        for n, section in enumerate(tree.iter_sections(), start=1):
            node = URIRef(f"{doc}#section-{n}")
            class_name = section.ontology_class
            if class_name is not None and class_name not in ont.classes:
                logger.warning("Section class %r is not in ontology %s", class_name, ont.name)
                class_name = None
            graph.add((node, RDF.type, DS[class_name or UNKNOWN_SECTION]))
            graph.add((doc, DS.hasSection, node))
            for concept in dict.fromkeys(section.concepts or []):
                graph.add((node, DS.hasConcept, Literal(concept)))
            if previous is not None:
                graph.add((previous, DS.followedBy, node))
            previous = node
        return graph

    @staticmethod
    def annotation_ntriples(graph: Graph) -> str:
        """N-Triples with lines sorted, so equal graphs give identical text."""
        lines = sorted(line for line in graph.serialize(format="nt").splitlines() if line.strip())
        return "\n".join(lines) + ("\n" if lines else "")


__all__ = [
    "DS",
    "START",
    "END",
    "PAD",
    "SemanticPrediction",
    "SemanticClassifier",
    "SequenceModel",
    "SemanticService",
    "truncate_words",
]
