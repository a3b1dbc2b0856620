"""
Pipeline Service - end-to-end training and document processing.

This service provides:
- Loading documents from line-CSV or TETML files, with sibling bookmark JSON
- Training the featurizer, structure models, semantic models and topic model
- A model bundle persisted as one directory
- Per-document processing: structure, semantic labels, concepts, summaries,
  ontology annotation and TOC outputs
- Comparison of the line-then-level pipeline against the single four-class model
"""

from __future__ import annotations

import io
import json
import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..classifiers.metrics import EvalReport, evaluate_predictions
from ..classifiers.model import Model, load_model_file, save_model_file, train
from ..config import PipelineConfig
from ..features.featurizer import DocumentFeaturizer
from ..ingest import load_line_record_corpus, parse_tetml
from ..models.document import Document
from ..models.ontology import OntologyClassSet, load_ontology
from ..models.section import TocTree
from ..utils.concurrency import map_documents
from ..utils.error_handler import ContractError, DocStructError, SchemaError, UsageError
from ..utils.serialization_utils import canonical_json, read_text, write_text
from .corpus_service import TASK_ALPHABETS, CorpusService
from .semantic_service import SemanticClassifier, SemanticService, SequenceModel
from .structure_service import StructurePipeline, StructureResult, StructureService
from .summary_service import SummaryService
from .topic_service import TopicModel, TopicService

logger = logging.getLogger(__name__)

FEATURIZER_DIR = "featurizer"
MODEL_FILES = {
    "line": "line.model",
    "level": "level.model",
    "four_class": "four_class.model",
    "semantic": "semantic.model",
    "sequence": "sequence.model",
    "topics": "topics.model",
}
STRUCTURE_TASKS = ("line", "level", "four_class")
TRAIN_TASKS = (*STRUCTURE_TASKS, "semantic", "topics", "all")
INPUT_SUFFIXES = {"line_csv": ".csv", "tetml": ".tetml"}

_UNSAFE_NAME_RE = re.compile(r"[^\w.-]")


def output_name(doc_id: str) -> str:
    """File-name-safe form of a document id."""
    return _UNSAFE_NAME_RE.sub("_", doc_id) or "document"


@dataclass
class ModelBundle:
    """Every trained artifact the pipeline can use; absent ones are ``None``."""

    featurizer: DocumentFeaturizer | None = None
    line_model: Model | None = None
    level_model: Model | None = None
    four_class_model: Model | None = None
    semantic: SemanticClassifier | None = None
    sequence: SequenceModel | None = None
    topics: TopicModel | None = None

    def save(self, model_dir: str | Path) -> list[Path]:
        model_dir = Path(model_dir)
        written = []
        if self.featurizer is not None:
            self.featurizer.save(model_dir / FEATURIZER_DIR)
            written.append(model_dir / FEATURIZER_DIR)
        for key, model in (
            ("line", self.line_model),
            ("level", self.level_model),
            ("four_class", self.four_class_model),
        ):
            if model is not None:
                save_model_file(model, model_dir / MODEL_FILES[key])
                written.append(model_dir / MODEL_FILES[key])
        if self.semantic is not None:
            self.semantic.save(model_dir / MODEL_FILES["semantic"])
            written.append(model_dir / MODEL_FILES["semantic"])
        if self.sequence is not None:
            self.sequence.save(model_dir / MODEL_FILES["sequence"])
            written.append(model_dir / MODEL_FILES["sequence"])
        if self.topics is not None:
            TopicService.save_model(self.topics, model_dir / MODEL_FILES["topics"])
            written.append(model_dir / MODEL_FILES["topics"])
        logger.info("Saved %d model artifacts to %s", len(written), model_dir)
        return written

    @classmethod
    def load(cls, model_dir: str | Path) -> ModelBundle:
        """Load whichever artifacts exist in ``model_dir``."""
        model_dir = Path(model_dir)
        if not model_dir.is_dir():
            raise UsageError(f"Model directory not found: {model_dir}")

        def path(key: str) -> Path | None:
            candidate = model_dir / MODEL_FILES[key]
            return candidate if candidate.exists() else None

        bundle = cls()
        if (model_dir / FEATURIZER_DIR).is_dir():
            bundle.featurizer = DocumentFeaturizer.load(model_dir / FEATURIZER_DIR)
        if p := path("line"):
            bundle.line_model = load_model_file(p)
        if p := path("level"):
            bundle.level_model = load_model_file(p)
        if p := path("four_class"):
            bundle.four_class_model = load_model_file(p)
        if p := path("semantic"):
            bundle.semantic = SemanticClassifier.load(p)
        if p := path("sequence"):
            bundle.sequence = SequenceModel.load(p)
        if p := path("topics"):
            bundle.topics = TopicService.load_model(p)
        return bundle

    def update(self, other: ModelBundle) -> ModelBundle:
        """Take every artifact ``other`` carries, keeping ours for the rest."""
        for name in self.__dataclass_fields__:
            value = getattr(other, name)
            if value is not None:
                setattr(self, name, value)
        return self

    def structure_pipeline(self, mode: str) -> StructurePipeline:
        if mode == "pipeline" and (self.line_model is None or self.level_model is None):
            raise UsageError("Pipeline structure mode needs trained line and level models")
        if mode == "four_class" and self.four_class_model is None:
            raise UsageError("Four-class structure mode needs a trained four-class model")
        if mode != "oracle" and self.featurizer is None:
            raise UsageError("Model directory has no featurizer")
        return StructurePipeline(
            mode, self.featurizer, self.line_model, self.level_model, self.four_class_model
        )


@dataclass
class DocumentResult:
    """Everything the pipeline produced for one document."""

    doc_id: str
    structure: StructureResult
    canonical_order: list[str | None] | None = None
    annotation: str = ""

    @property
    def tree(self) -> TocTree:
        return self.structure.tree

    def structure_dict(self) -> dict[str, Any]:
        data = self.tree.to_dict()
        if self.canonical_order is not None:
            data["canonical_order"] = list(self.canonical_order)
        return data

    def summary(self) -> dict[str, Any]:
        sections = self.tree.sections()
        return {
            "doc_id": self.doc_id,
            "lines": self.tree.line_count(),
            "sections": len(sections),
            "top_level_sections": len(self.tree.roots),
            "classified_sections": sum(s.ontology_class is not None for s in sections),
            "summarized_sections": sum(bool(s.summary) for s in sections),
        }


@dataclass
class PipelineReport:
    documents: list[dict[str, Any]] = field(default_factory=list)
    written: list[Path] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "documents": self.documents,
            "totals": {
                key: sum(d[key] for d in self.documents)
                for key in ("lines", "sections", "classified_sections", "summarized_sections")
            },
        }


class PipelineService:
    """Service orchestrating training and end-to-end document processing."""

    @staticmethod
    def discover_inputs(paths: Sequence[str | Path], input_format: str) -> list[Path]:
        """Expand directories into their input files (sorted); files pass through."""
        if input_format not in INPUT_SUFFIXES:
            raise UsageError(f"Unknown input format {input_format!r}; expected one of {tuple(INPUT_SUFFIXES)}")
        suffix = INPUT_SUFFIXES[input_format]
        files: list[Path] = []
        for raw in paths:
            path = Path(raw)
            if path.is_dir():
                files.extend(sorted(p for p in path.iterdir() if p.suffix == suffix))
            elif path.exists():
                files.append(path)
            else:
                raise UsageError(f"Input not found: {path}")
        if not files:
            raise UsageError(f"No {input_format} inputs found in {[str(p) for p in paths]}")
        return files

    @staticmethod
    def discover_structure_files(paths: Sequence[str | Path]) -> list[Path]:
        """Structure JSON files; a pipeline output directory means its ``structure/``."""
        files: list[Path] = []
        for raw in paths:
            path = Path(raw)
            if path.is_dir():
                if (path / "structure").is_dir():
                    path = path / "structure"
                files.extend(sorted(p for p in path.iterdir() if p.suffix == ".json"))
            elif path.exists():
                files.append(path)
            else:
                raise UsageError(f"Input not found: {path}")
        if not files:
            raise UsageError(f"No structure JSON found in {[str(p) for p in paths]}")
        return files

    @staticmethod
    def summarize_structure_file(path: str | Path, config: PipelineConfig) -> int:
        """
        Fill the section summaries of one structure JSON file in place.

        Fields the tree model does not own (``canonical_order``) are kept
        as they are. Returns the number of summarized sections.
        """
        path = Path(path)
        try:
            data = json.loads(read_text(path))
        except json.JSONDecodeError as e:
            raise SchemaError(f"Structure JSON {path} is invalid: {e}") from e
        if not isinstance(data, dict):
            raise SchemaError(f"Structure JSON {path} must be an object")
        tree = TocTree.from_dict(data)
        summarized = SummaryService.summarize_tree(
            tree, config.ratio, config.textrank_damping, config.textrank_tol, config.textrank_max_iter
        )
        write_text(path, canonical_json({**data, **tree.to_dict()}, decimals=None))
        return summarized

    @staticmethod
    def load_documents(
        paths: Sequence[str | Path], input_format: str = "line_csv", threads: int = 1
    ) -> list[Document]:
        """
        Parse every input file; a ``<doc_id>.bookmarks.json`` next to the
        input is attached as the document's TOC.
        """
        files = PipelineService.discover_inputs(paths, input_format)

        def load(path: Path) -> list[Document]:
            try:
                if input_format == "tetml":
                    docs = [parse_tetml(path.read_bytes(), doc_id=path.stem)]
                else:
                    with path.open(encoding="utf-8", newline="") as source:
                        docs = load_line_record_corpus(io.StringIO(source.read(), newline=""))
            except OSError as e:
                raise DocStructError(f"Cannot read {path}: {e}") from e
            attached = []
            for doc in docs:
                bookmarks = path.parent / f"{doc.doc_id}.bookmarks.json"
                if doc.toc is None and bookmarks.exists():
                    doc = doc.with_toc(CorpusService.load_bookmarks(bookmarks))
                attached.append(doc)
            return attached

        docs = [doc for group in map_documents(load, files, threads) for doc in group]
        logger.info("Loaded %d documents from %d %s files", len(docs), len(files), input_format)
        return docs

    @staticmethod
    def ensure_labels(docs: Sequence[Document], config: PipelineConfig) -> list[Document]:
        """Label unlabeled documents from their bookmarks; labeled ones pass through."""
        pending = [doc for doc in docs if not doc.is_labeled]
        if not pending:
            return list(docs)
        missing = [doc.doc_id for doc in pending if doc.toc is None]
        if missing:
            raise UsageError(f"Documents without labels or bookmarks: {missing}")
        mapped = {
            m.document.doc_id: m.document
            for m in CorpusService.label_corpus(pending, config.similarity_threshold, config.threads)
        }
        return [mapped.get(doc.doc_id, doc) for doc in docs]

    @staticmethod
    def fit_featurizer(docs: Sequence[Document], config: PipelineConfig) -> DocumentFeaturizer:
        return DocumentFeaturizer.fit(
            docs,
            vocab_min_frequency=config.vocab_min_frequency,
            min_df=config.ngram_min_df,
            max_features=config.ngram_max_features,
        )

    @staticmethod
    def train_structure_model(
        docs: Sequence[Document],
        featurizer: DocumentFeaturizer,
        task: str,
        config: PipelineConfig,
        kind: str | None = None,
        mode: str | None = None,
    ) -> Model:
        if task not in STRUCTURE_TASKS:
            raise ContractError(f"Unknown structure task {task!r}; expected one of {STRUCTURE_TASKS}")
        kind = kind or config.classifier
        ds = CorpusService.build_line_dataset(
            docs, featurizer, task, mode or config.vector_mode, config.threads
        )
        return train(kind, ds, config.classifier_hyperparams(kind), seed=config.seed)

    @staticmethod
    def map_structure(
        structure: StructurePipeline, docs: Sequence[Document], threads: int = 1
    ) -> list[StructureResult]:
        return map_documents(structure.run, docs, threads)

    @staticmethod
    def oracle_trees(docs: Sequence[Document], threads: int = 1) -> list[TocTree]:
        results = PipelineService.map_structure(StructurePipeline("oracle"), docs, threads)
        return [result.tree for result in results]

    @staticmethod
    def train_semantic(
        trees: Sequence[TocTree], ontology: OntologyClassSet, config: PipelineConfig
    ) -> tuple[SemanticClassifier, SequenceModel]:
        """Section classifier from alias-mapped headers, plus the section sequence model."""
        examples = SemanticService.training_examples(trees, ontology)
        if not examples:
            raise ContractError("No section header maps to an ontology class; nothing to train on")
        classifier = SemanticClassifier.fit(
            examples,
            ontology,
            kind=config.semantic_classifier,
            truncation=config.semantic_truncation,
            seed=config.seed,
            hyperparams=config.classifier_hyperparams(config.semantic_classifier),
        )
        sequences = [
            [c for root in tree.roots if (c := SemanticService.map_header_to_class(root.title, ontology))]
            for tree in trees
        ]
        sequence = SemanticService.fit_sequence_model(sequences, ontology, config.sequence_max_length)
        return classifier, sequence

    @staticmethod
    def section_tokens(trees: Sequence[TocTree], ngram: str = "word") -> list[list[str]]:
        return [
            TopicService.tokenize_section(section.text, ngram)
            for tree in trees
            for section in tree.iter_sections()
        ]

    @staticmethod
    def train_topics(trees: Sequence[TocTree], config: PipelineConfig) -> TopicModel:
        sections = PipelineService.section_tokens(trees, config.lda_ngram)
        dictionary = TopicService.build_dictionary(
            sections, config.lda_min_sections, config.lda_max_fraction, config.lda_cap
        )
        return TopicService.train_lda(
            sections,
            dictionary,
            K=config.k_topics,
            alpha=config.effective_lda_alpha,
            beta=config.lda_beta,
            iterations=config.lda_iterations,
            seed=config.seed,
            ngram=config.lda_ngram,
        )

    @staticmethod
    def train_models(
        docs: Sequence[Document],
        config: PipelineConfig,
        task: str = "all",
        ontology: OntologyClassSet | None = None,
        featurizer: DocumentFeaturizer | None = None,
    ) -> ModelBundle:
        """
        Train the artifacts of ``task`` on labeled documents.

        ``all`` covers the structure models and the semantic models; the topic
        model is trained only when asked for.
        """
        if task not in TRAIN_TASKS:
            raise UsageError(f"Unknown training task {task!r}; expected one of {TRAIN_TASKS}")
        docs = PipelineService.ensure_labels(docs, config)
        bundle = ModelBundle()

        structure_tasks = STRUCTURE_TASKS if task == "all" else tuple(t for t in STRUCTURE_TASKS if t == task)
        if structure_tasks:
            bundle.featurizer = featurizer or PipelineService.fit_featurizer(docs, config)
            for t in structure_tasks:
                model = PipelineService.train_structure_model(docs, bundle.featurizer, t, config)
                setattr(bundle, f"{t}_model", model)

        if task in ("semantic", "all", "topics"):
            trees = PipelineService.oracle_trees(docs, config.threads)
            if task in ("semantic", "all"):
                ontology = ontology or load_ontology(config.ontology)
                bundle.semantic, bundle.sequence = PipelineService.train_semantic(trees, ontology, config)
            if task == "topics":
                bundle.topics = PipelineService.train_topics(trees, config)
        return bundle

    @staticmethod
    def process_document(
        doc: Document,
        bundle: ModelBundle,
        config: PipelineConfig,
        ontology: OntologyClassSet,
        structure: StructurePipeline | None = None,
    ) -> DocumentResult:
        """Structure, semantic labels, concepts, summaries and annotation for one document."""
        structure = structure or bundle.structure_pipeline(config.structure_mode)
        result = structure.run(doc)
        tree = result.tree

        SemanticService.label_tree(tree, ontology, bundle.semantic)
        if bundle.topics is not None:
            TopicService.annotate_tree(
                tree, bundle.topics, config.concept_terms, config.lda_infer_iterations, config.seed
            )
        SummaryService.summarize_tree(
            tree, config.ratio, config.textrank_damping, config.textrank_tol, config.textrank_max_iter
        )
        order = None
        if bundle.sequence is not None:
            order = [s.ontology_class for s in SemanticService.reorder_sections(tree, bundle.sequence)]

        graph = SemanticService.emit_ontology_annotation(tree, ontology)
        document_result = DocumentResult(
            doc.doc_id, result, order, SemanticService.annotation_ntriples(graph)
        )
        # the serialized tree must still hold every line
        StructureService.check_line_conservation(
            TocTree.from_dict(document_result.structure_dict()), doc
        )
        return document_result

    @staticmethod
    def write_document(result: DocumentResult, out_dir: str | Path) -> list[Path]:
        out_dir = Path(out_dir)
        name = output_name(result.doc_id)
        paths = [
            out_dir / "structure" / f"{name}.json",
            out_dir / "toc" / f"{name}.txt",
            out_dir / "annotations" / f"{name}.nt",
        ]
        write_text(paths[0], canonical_json(result.structure_dict(), decimals=None))
        write_text(paths[1], StructureService.toc_to_text(result.tree))
        write_text(paths[2], result.annotation)
        return paths

    @staticmethod
    def run_pipeline(
        docs: Sequence[Document],
        bundle: ModelBundle,
        config: PipelineConfig,
        out_dir: str | Path | None = None,
        ontology: OntologyClassSet | None = None,
    ) -> PipelineReport:
        """
        Process every document on the work pool and write its outputs.

        Writes ``structure/<doc>.json``, ``toc/<doc>.txt``,
        ``annotations/<doc>.nt`` and a ``pipeline.json`` report under
        ``out_dir`` (the config's ``out_dir`` when not given).
        """
        out_dir = Path(out_dir or config.out_dir)
        ontology = ontology or load_ontology(config.ontology)
        if bundle.semantic is not None and bundle.semantic.ontology.classes != ontology.classes:
            logger.warning(
                "Semantic model was trained on ontology %s, annotating with %s",
                bundle.semantic.ontology.name,
                ontology.name,
            )
        structure = bundle.structure_pipeline(config.structure_mode)

        results = map_documents(
            lambda doc: PipelineService.process_document(doc, bundle, config, ontology, structure),
            docs,
            config.threads,
        )
        report = PipelineReport()
        for result in results:
            report.written.extend(PipelineService.write_document(result, out_dir))
            report.documents.append(result.summary())
        report_path = out_dir / "pipeline.json"
        write_text(report_path, canonical_json(report.to_dict()))
        report.written.append(report_path)
        logger.info("Pipeline processed %d documents into %s", len(results), out_dir)
        return report

    @staticmethod
    def compare_structure_modes(
        docs: Sequence[Document], bundle: ModelBundle, threads: int = 1
    ) -> dict[str, EvalReport]:
        """Four-class scores of the line-then-level pipeline and of the single four-class model."""
        alphabet = TASK_ALPHABETS["four_class"]
        truth = [
            y for doc in docs for _, y in CorpusService.task_labels(doc, "four_class")
        ]
        reports = {}
        for mode in ("pipeline", "four_class"):
            structure = bundle.structure_pipeline(mode)
            predicted = map_documents(structure.predicted_four_class, docs, threads)
            reports[mode] = evaluate_predictions(
                truth, [label for labels in predicted for label in labels], alphabet
            )
        return reports


__all__ = [
    "FEATURIZER_DIR",
    "MODEL_FILES",
    "STRUCTURE_TASKS",
    "TRAIN_TASKS",
    "ModelBundle",
    "DocumentResult",
    "PipelineReport",
    "PipelineService",
    "output_name",
]
