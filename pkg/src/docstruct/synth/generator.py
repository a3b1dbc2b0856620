"""
Synthetic corpus generator.

Builds labeled positional documents with planted structure: numbered headers
at three levels, body text drawn from per-class and per-domain vocabularies,
distractor lines that look like headers layout-wise, and the bookmark TOC
and section classes that describe the truth.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from faker import Faker
from marshmallow import ValidationError

from ..ingest import compute_page_statistics, dumps_line_records, write_tetml
from ..models.document import BOLD_WEIGHT, NORMAL_WEIGHT, BookmarkEntry, Document, LineRecord
from ..models.ontology import OntologyClassSet, load_ontology
from ..utils.concurrency import map_documents
from ..utils.error_handler import SchemaError, UsageError
from ..utils.serialization_utils import canonical_json, read_text, write_text
from ..utils.validation_schemas import CorpusSpecSchema
from .vocabulary import (
    CANONICAL_ORDER,
    CITATION_CLASSES,
    CLASS_WORDS,
    DOMAIN_WORDS,
    EQUATION_CLASSES,
    EQUATIONS,
    FILLER_WORDS,
    GENERIC_WORDS,
    SUBSECTION_NOUNS,
)

logger = logging.getLogger(__name__)

PAGE_WIDTH = 612.0
PAGE_HEIGHT = 792.0
MARGIN_LEFT = 72.0
MARGIN_TOP = 72.0
MARGIN_BOTTOM = 720.0
TEXT_RIGHT = 540.0
LIST_INDENT = 90.0

BODY_SIZE = 10.0
HEADER_SIZES = {1: 14.0, 2: 12.0, 3: 11.0}
BODY_SPACING = 12.0
GAP_ABOVE_HEADER = 24.0
GAP_BELOW_HEADER = 18.0
CAPTION_GAP = 18.0
WORDS_PER_LINE = 12

BODY_FONT = "Times-Roman"
HEADER_FONT = "Times-Bold"
CAPTION_FONT = "Times-Italic"


@dataclass(frozen=True)
class CorpusSpec:
    """Parameters of a synthetic corpus; see ``CorpusSpecSchema`` for the JSON form."""

    n_docs: int = 20
    sections_min: int = 6
    sections_max: int = 12
    depth_probs: tuple[float, float, float] = (0.5, 0.3, 0.2)
    body_lines_min: int = 4
    body_lines_max: int = 10
    font_jitter: float = 0.0
    spacing_jitter: float = 0.0
    header_noise: float = 0.0
    corruption_rate: float = 0.0
    distractor_rate: float = 0.3
    domains: tuple[str, ...] = tuple(DOMAIN_WORDS)
    seed: int = 42

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["depth_probs"] = list(self.depth_probs)
        data["domains"] = list(self.domains)
        return data


def corpus_spec_from_dict(data: dict[str, Any]) -> CorpusSpec:
    try:
        loaded = CorpusSpecSchema().load(data)
    except ValidationError as e:
        raise SchemaError(f"Invalid corpus spec: {e.messages}") from e

    domains = loaded.pop("domains") or list(DOMAIN_WORDS)
    unknown = sorted(set(domains) - set(DOMAIN_WORDS))
    if unknown:
        raise SchemaError(f"Unknown domains {unknown}; expected a subset of {sorted(DOMAIN_WORDS)}")
    return CorpusSpec(
        **{**loaded, "depth_probs": tuple(loaded["depth_probs"]), "domains": tuple(domains)}
    )


def load_corpus_spec(path: str | Path) -> CorpusSpec:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"Corpus spec not found: {path}")
    try:
        data = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise SchemaError(f"Corpus spec {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise SchemaError(f"Corpus spec {path} must be a JSON object")
    return corpus_spec_from_dict(data)


@dataclass(frozen=True)
class PlantedSection:
    title: str
    level: int
    ontology_class: str
    line_index: int


@dataclass(frozen=True)
class GeneratedDocument:
    """A labeled document with its bookmark TOC and planted section truth."""

    document: Document
    domain: str
    sections: tuple[PlantedSection, ...] = field(default_factory=tuple)

    @property
    def section_classes(self) -> list[str]:
        return [s.ontology_class for s in self.sections]

    @property
    def top_level_classes(self) -> list[str]:
        return [s.ontology_class for s in self.sections if s.level == 1]

    def truth_dict(self) -> dict[str, Any]:
        return {
            "doc_id": self.document.doc_id,
            "domain": self.domain,
            "sections": [asdict(s) for s in self.sections],
        }


def _quarter(value: float) -> float:
    return round(value * 4.0) / 4.0


def _class_order(ontology: OntologyClassSet) -> list[str]:
    known = [c for c in CANONICAL_ORDER if c in ontology.classes]
    return known + [c for c in ontology.classes if c not in known]


def _class_titles(ontology: OntologyClassSet) -> dict[str, list[str]]:
    titles: dict[str, list[str]] = {c: [] for c in ontology.classes}
    for alias, target in ontology.aliases.items():
        titles[target].append(alias.title())
    for name, options in titles.items():
        if not options:
            options.append(name)
        options.sort()
    return titles


class _DocumentWriter:
    """Lays lines out top to bottom, breaking pages at the bottom margin."""

    def __init__(self, spec: CorpusSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.lines: list[LineRecord] = []
        self.page = 1
        self.baseline: float | None = None

    def _size(self, nominal: float) -> float:
        if self.spec.font_jitter > 0:
            nominal += self.rng.normal(0.0, self.spec.font_jitter)
        return max(_quarter(nominal), 4.0)

    def _gap(self, nominal: float, size: float) -> float:
        if self.spec.spacing_jitter > 0:
            nominal += self.rng.normal(0.0, self.spec.spacing_jitter)
        # at least the line height: consecutive lines never overlap
        return max(_quarter(nominal), size)

    def add(
        self,
        text: str,
        label: int,
        nominal_size: float,
        weight: float,
        family: str,
        gap: float,
        x_left: float = MARGIN_LEFT,
    ) -> int:
        size = self._size(nominal_size)
        if self.baseline is None:
            baseline = MARGIN_TOP + size
        else:
            baseline = self.baseline + self._gap(gap, size)
            if baseline > MARGIN_BOTTOM:
                self.page += 1
                baseline = MARGIN_TOP + size
        width = _quarter(0.5 * size * len(text))
        self.lines.append(
            LineRecord(
                text=text,
                page_number=self.page,
                font_size=size,
                font_weight=weight,
                font_family=family,
                x_left=x_left,
                x_right=min(x_left + width, TEXT_RIGHT),
                y_top=baseline - size,
                y_bottom=baseline,
                page_width=PAGE_WIDTH,
                page_height=PAGE_HEIGHT,
                label=label,
            )
        )
        self.baseline = baseline
        return len(self.lines) - 1


class CorpusGenerator:
    """Generates documents for one spec; each document draws from its own seed."""

    def __init__(self, spec: CorpusSpec, ontology: OntologyClassSet | None = None):
        self.spec = spec
        self.ontology = ontology if ontology is not None else load_ontology("arxiv")
        self.class_order = _class_order(self.ontology)
        self.class_titles = _class_titles(self.ontology)

    def _levels(self, rng: np.random.Generator) -> list[int]:
        count = int(rng.integers(self.spec.sections_min, self.spec.sections_max + 1))
        levels = [1]
        for _ in range(count - 1):
            level = int(rng.choice(3, p=self.spec.depth_probs)) + 1
            levels.append(min(level, levels[-1] + 1))
        return levels

    def _top_classes(self, rng: np.random.Generator, n: int) -> list[str]:
        order = self.class_order
        picks = rng.choice(len(order), size=n, replace=n > len(order))
        return [order[i] for i in sorted(picks)]

    def _sentence(self, rng: np.random.Generator, ontology_class: str, domain: str) -> str:
        class_words = CLASS_WORDS.get(ontology_class, GENERIC_WORDS)
        domain_words = DOMAIN_WORDS[domain]
        words = []
        for _ in range(int(rng.integers(8, 15))):
            draw = rng.random()
            if draw < 0.35:
                words.append(class_words[rng.integers(len(class_words))])
            elif draw < 0.7:
                words.append(domain_words[rng.integers(len(domain_words))])
            else:
                words.append(FILLER_WORDS[rng.integers(len(FILLER_WORDS))])
        if ontology_class in CITATION_CLASSES:
            words.append(f"[{int(rng.integers(1, 60))}]")
        if ontology_class in EQUATION_CLASSES and rng.random() < 0.5:
            words.extend(["where", EQUATIONS[rng.integers(len(EQUATIONS))]])
        words[0] = words[0].capitalize()
        return " ".join(words) + "."

    def _body(self, rng: np.random.Generator, ontology_class: str, domain: str, n_lines: int) -> list[str]:
        words: list[str] = []
        while len(words) < n_lines * WORDS_PER_LINE:
            words.extend(self._sentence(rng, ontology_class, domain).split(" "))
        return [
            " ".join(words[i * WORDS_PER_LINE : (i + 1) * WORDS_PER_LINE]) for i in range(n_lines)
        ]

    def _corrupt(self, rng: np.random.Generator, title: str) -> str:
        if rng.random() >= self.spec.corruption_rate:
            return title
        chars = list(title)
        pos = int(rng.integers(len(chars) // 2, len(chars)))
        if rng.random() < 0.5 and len(chars) > 4:
            del chars[pos]
        else:
            chars[pos] = "x" if chars[pos] != "x" else "z"
        return "".join(chars)

    def generate_document(self, index: int) -> GeneratedDocument:
        spec = self.spec
        rng = np.random.default_rng([spec.seed, index])
        fake = Faker()
        fake.seed_instance(spec.seed * 1_000_003 + index)

        doc_id = f"synth-{spec.seed}-{index:04d}"
        domain = spec.domains[int(rng.integers(len(spec.domains)))]
        levels = self._levels(rng)
        top_classes = iter(self._top_classes(rng, levels.count(1)))
        subtitles = [
            f"{word.title()} {noun}"
            for word in DOMAIN_WORDS[domain]
            for noun in SUBSECTION_NOUNS
        ]
        subtitle_picks = iter(rng.permutation(len(subtitles)))

        out = _DocumentWriter(spec, rng)
        out.add(f"{fake.name()} and {fake.name()}", 0, BODY_SIZE, NORMAL_WEIGHT, BODY_FONT, BODY_SPACING)
        out.add(f"{fake.company()}, {fake.city()}", 0, BODY_SIZE, NORMAL_WEIGHT, BODY_FONT, BODY_SPACING)

        sections: list[PlantedSection] = []
        toc: list[BookmarkEntry] = []
        numbering = [0, 0, 0]
        used_titles: set[str] = set()
        current_class = self.class_order[0]
        figures = 0
        for level in levels:
            numbering[level - 1] += 1
            numbering[level:] = [0] * (3 - level)
            number = ".".join(str(n) for n in numbering[:level])
            if level == 1:
                current_class = next(top_classes)
                options = self.class_titles[current_class]
                title = options[int(rng.integers(len(options)))]
                if title in used_titles:
                    title = current_class
            else:
                title = subtitles[int(next(subtitle_picks)) % len(subtitles)]
            used_titles.add(title)
            header = f"{number} {title}"

            noisy = rng.random() < spec.header_noise
            line_index = out.add(
                header,
                level,
                BODY_SIZE if noisy else HEADER_SIZES[level],
                NORMAL_WEIGHT if noisy else BOLD_WEIGHT,
                BODY_FONT if noisy else HEADER_FONT,
                GAP_ABOVE_HEADER,
            )
            sections.append(PlantedSection(header, level, current_class, line_index))
            toc.append(BookmarkEntry(self._corrupt(rng, header), level, len(toc)))

            n_lines = int(rng.integers(spec.body_lines_min, spec.body_lines_max + 1))
            body = self._body(rng, current_class, domain, n_lines)
            distractor_at = int(rng.integers(1, n_lines + 1)) if rng.random() < spec.distractor_rate else -1
            for i, text in enumerate(body):
                gap = GAP_BELOW_HEADER if i == 0 else BODY_SPACING
                if i == distractor_at:
                    gap = CAPTION_GAP
                out.add(text, 0, BODY_SIZE, NORMAL_WEIGHT, BODY_FONT, gap)
                if i + 1 == distractor_at:
                    if rng.random() < 0.5:
                        figures += 1
                        caption = f"Figure {figures}: {self._sentence(rng, current_class, domain)}"
                        out.add(caption, 0, BODY_SIZE, NORMAL_WEIGHT, CAPTION_FONT, CAPTION_GAP)
                    else:
                        item = self._sentence(rng, current_class, domain)
                        out.add(f"1. {item}", 0, BODY_SIZE, NORMAL_WEIGHT, BODY_FONT, BODY_SPACING, LIST_INDENT)
                        distractor_at = -1

        document = compute_page_statistics(Document(doc_id, tuple(out.lines), toc=tuple(toc)))
        return GeneratedDocument(document, domain, tuple(sections))


def generate_corpus(
    spec: CorpusSpec,
    ontology: OntologyClassSet | None = None,
    threads: int = 1,
) -> list[GeneratedDocument]:
    """
    Generate ``spec.n_docs`` labeled documents.

    Document ``i`` draws from ``default_rng([seed, i])``, so the corpus is
    the same for any thread count.
    """
    generator = CorpusGenerator(spec, ontology)
    corpus = map_documents(generator.generate_document, range(spec.n_docs), threads)
    logger.info(
        "Generated %d synthetic documents (%d lines, %d headers)",
        len(corpus),
        sum(len(g.document.lines) for g in corpus),
        sum(len(g.sections) for g in corpus),
    )
    return corpus


WRITER_FORMATS = ("line_csv", "tetml")


def write_corpus(
    corpus: Sequence[GeneratedDocument],
    out_dir: str | Path,
    formats: Sequence[str] = WRITER_FORMATS,
) -> list[Path]:
    """Write every document as ``<doc_id>.csv`` / ``.tetml`` plus bookmark and truth JSON."""
    unknown = sorted(set(formats) - set(WRITER_FORMATS))
    if unknown:
        raise UsageError(f"Unknown output formats {unknown}; expected {WRITER_FORMATS}")
    out_dir = Path(out_dir)
    written = []
    for generated in corpus:
        doc = generated.document
        base = out_dir / doc.doc_id
        if "line_csv" in formats:
            written.append(base.with_suffix(".csv"))
            write_text(written[-1], dumps_line_records(doc))
        if "tetml" in formats:
            path = base.with_suffix(".tetml")
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(write_tetml(doc))
            written.append(path)
        written.append(out_dir / f"{doc.doc_id}.bookmarks.json")
        write_text(written[-1], canonical_json([entry.to_dict() for entry in doc.toc or ()]))
        written.append(out_dir / f"{doc.doc_id}.truth.json")
        write_text(written[-1], canonical_json(generated.truth_dict()))
    logger.info("Wrote %d files for %d documents to %s", len(written), len(corpus), out_dir)
    return written


__all__ = [
    "CorpusSpec",
    "CorpusGenerator",
    "GeneratedDocument",
    "PlantedSection",
    "WRITER_FORMATS",
    "corpus_spec_from_dict",
    "generate_corpus",
    "load_corpus_spec",
    "write_corpus",
]
