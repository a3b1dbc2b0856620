#!/usr/bin/env python3
"""
docstruct command-line front end.

Usage:
    docstruct gen --spec corpus.json --out-dir corpus/
    docstruct train corpus/ --model-dir models/ --task all
    docstruct eval corpus/ --model-dir models/ --task line
    docstruct pipeline corpus/ --model-dir models/ --out-dir out/

Configuration:
    Defaults < ``--config`` YAML file < DOCSTRUCT_* environment variables < flags.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

from .classifiers.metrics import cross_validate, evaluate
from .config import PipelineConfig, default_config_yaml, load_config
from .ingest import dumps_line_records
from .models.document import Document
from .models.ontology import load_ontology
from .models.section import TocTree
from .services.corpus_service import CorpusService
from .services.pipeline_service import ModelBundle, PipelineService, output_name
from .services.semantic_service import SemanticService
from .services.structure_service import STRUCTURE_MODES, StructureService
from .services.topic_service import TopicService
from .synth.generator import WRITER_FORMATS, CorpusSpec, generate_corpus, load_corpus_spec, write_corpus
from .utils.concurrency import map_documents
from .utils.error_handler import ContractError, UsageError, handle_cli_errors
from .utils.formatting import (
    format_comparison,
    format_cross_validation,
    format_eval_report,
    format_top_terms,
)
from .utils.serialization_utils import canonical_json, write_text

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EVAL_TASKS = ("line", "level", "four_class", "semantic", "structure")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="Flat YAML config file")
    common.add_argument("--seed", type=int, help="Seed of every random choice")
    common.add_argument("--threads", type=int, help="Document work pool size")
    common.add_argument("--out-dir", dest="out_dir", metavar="DIR", help="Output directory")
    common.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    return common


def _input_parser() -> argparse.ArgumentParser:
    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("inputs", nargs="+", metavar="INPUT", help="Input files or directories")
    inputs.add_argument(
        "--format", dest="input_format", choices=["line_csv", "tetml"], help="Input format"
    )
    return inputs


def _model_parser(required: bool) -> argparse.ArgumentParser:
    models = argparse.ArgumentParser(add_help=False)
    models.add_argument(
        "--model-dir", dest="model_dir", required=required, metavar="DIR", help="Model directory"
    )
    models.add_argument(
        "--structure-mode", dest="structure_mode", choices=list(STRUCTURE_MODES), help="Structure mode"
    )
    return models


def _mode_parser() -> argparse.ArgumentParser:
    modes = argparse.ArgumentParser(add_help=False)
    modes.add_argument("--mode", dest="vector_mode", choices=["layout", "text", "combined"])
    modes.add_argument("--classifier", choices=["nb", "dt", "svm"])
    return modes


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    inputs = _input_parser()
    modes = _mode_parser()

    parser = argparse.ArgumentParser(
        prog="docstruct",
        description="Section header detection, TOC induction and semantic section labeling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common, inputs], help="Parse and label documents")
    p.add_argument("--threshold", dest="similarity_threshold", type=float, help="Bookmark similarity threshold")

    p = sub.add_parser("gen", parents=[common], help="Generate a synthetic corpus")
    p.add_argument("--spec", metavar="FILE", help="CorpusSpec JSON file")
    p.add_argument("--n-docs", dest="n_docs", type=int, help="Override the CorpusSpec document count")
    p.add_argument("--formats", nargs="+", choices=list(WRITER_FORMATS), default=list(WRITER_FORMATS))

    p = sub.add_parser("featurize", parents=[common, inputs], help="Fit and save the featurizer")
    p.add_argument("--model-dir", dest="model_dir", required=True, metavar="DIR")

    p = sub.add_parser("train", parents=[common, inputs, modes], help="Train models")
    p.add_argument("--model-dir", dest="model_dir", required=True, metavar="DIR")
    p.add_argument(
        "--task", choices=["line", "level", "four_class", "semantic", "topics", "all"], default="all"
    )

    p = sub.add_parser("eval", parents=[common, inputs, modes, _model_parser(False)], help="Evaluate models")
    p.add_argument("--task", choices=list(EVAL_TASKS), default="line")
    p.add_argument("--cross-validate", dest="cross_validate", action="store_true", help="Stratified k-fold run")
    p.add_argument("--folds", type=int, help="Number of folds")

    sub.add_parser("structure", parents=[common, inputs, _model_parser(False)], help="Recover section trees")

    p = sub.add_parser("semantics", parents=[common, inputs, _model_parser(False)], help="Label sections")
    p.add_argument("--discover", type=int, default=0, metavar="N", help="Print the N most frequent headers")

    p = sub.add_parser("topics", parents=[common, inputs, _model_parser(False)], help="Train topics and concepts")
    p.add_argument("--k-topics", dest="k_topics", type=int, help="Number of topics")
    p.add_argument("--top", type=int, default=10, help="Terms listed per topic")

    p = sub.add_parser("summarize", parents=[common], help="Summarize sections of structure JSON in place")
    p.add_argument(
        "inputs", nargs="+", metavar="INPUT", help="Structure JSON files, structure or pipeline output directories"
    )
    p.add_argument("--ratio", type=float, help="Fraction of sentences kept")

    p = sub.add_parser("pipeline", parents=[common, inputs, _model_parser(True)], help="Run everything")
    p.add_argument("--ratio", type=float, help="Fraction of sentences kept")

    sub.add_parser("config", parents=[common], help="Print the effective configuration")
    return parser


CONFIG_FLAGS = (
    "seed",
    "threads",
    "out_dir",
    "log_level",
    "input_format",
    "similarity_threshold",
    "vector_mode",
    "classifier",
    "structure_mode",
    "k_topics",
    "ratio",
    "folds",
)


def _config(args: argparse.Namespace) -> PipelineConfig:
    overrides = {name: getattr(args, name, None) for name in CONFIG_FLAGS}
    return load_config(args.config, overrides)


def _load_docs(args: argparse.Namespace, config: PipelineConfig) -> list[Document]:
    return PipelineService.load_documents(args.inputs, config.input_format, config.threads)


def _bundle(args: argparse.Namespace) -> ModelBundle:
    return ModelBundle.load(args.model_dir) if args.model_dir else ModelBundle()


def _structure_trees(docs: Sequence[Document], bundle: ModelBundle, config: PipelineConfig) -> list[TocTree]:
    mode = config.structure_mode
    if mode == "oracle" or bundle.featurizer is None:
        if mode != "oracle":
            logger.info("No trained structure models given; using ground-truth labels")
        docs = PipelineService.ensure_labels(docs, config)
        mode = "oracle"
    structure = bundle.structure_pipeline(mode)
    return [result.tree for result in PipelineService.map_structure(structure, docs, config.threads)]


def _write_trees(trees: Sequence[TocTree], out_dir: Path) -> None:
    for tree in trees:
        name = output_name(tree.doc_id)
        write_text(out_dir / "structure" / f"{name}.json", canonical_json(tree.to_dict()))
        write_text(out_dir / "toc" / f"{name}.txt", StructureService.toc_to_text(tree))


def cmd_ingest(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = _load_docs(args, config)
    out_dir = Path(config.out_dir)
    pending = [doc for doc in docs if not doc.is_labeled and doc.toc is not None]
    mappings = CorpusService.label_corpus(pending, config.similarity_threshold, config.threads)
    labeled = {m.document.doc_id: m.document for m in mappings}
    docs = [labeled.get(doc.doc_id, doc) for doc in docs]

    write_text(out_dir / "lines.csv", dumps_line_records(docs))
    write_text(out_dir / "bookmark_mapping.json", canonical_json([m.to_dict() for m in mappings], decimals=4))
    unmatched = sum(len(m.unmatched) for m in mappings)
    print(
        f"Ingested {len(docs)} documents ({sum(len(d.lines) for d in docs)} lines); "
        f"{len(mappings)} labeled from bookmarks, {unmatched} unmatched entries"
    )
    return 0


def cmd_gen(args: argparse.Namespace, config: PipelineConfig) -> int:
    spec = load_corpus_spec(args.spec) if args.spec else CorpusSpec(seed=config.seed)
    changes: dict[str, Any] = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.n_docs is not None:
        changes["n_docs"] = args.n_docs
    if changes:
        spec = replace(spec, **changes)
    corpus = generate_corpus(spec, load_ontology(config.ontology), config.threads)
    written = write_corpus(corpus, config.out_dir, args.formats)
    write_text(Path(config.out_dir) / "corpus_spec.json", canonical_json(spec.to_dict()))
    print(f"Generated {len(corpus)} documents, {len(written)} files in {config.out_dir}")
    return 0


def cmd_featurize(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = PipelineService.ensure_labels(_load_docs(args, config), config)
    featurizer = PipelineService.fit_featurizer(docs, config)
    ModelBundle(featurizer=featurizer).save(args.model_dir)
    print(
        f"Featurizer: {len(featurizer.vocabulary)} vocabulary terms, "
        f"{featurizer.dimension('text')} n-grams, {featurizer.dimension('combined')} combined features"
    )
    return 0


def cmd_train(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = _load_docs(args, config)
    model_dir = Path(args.model_dir)
    existing = ModelBundle.load(model_dir) if model_dir.is_dir() else ModelBundle()
    trained = PipelineService.train_models(
        docs, config, args.task, load_ontology(config.ontology), existing.featurizer
    )
    written = existing.update(trained).save(model_dir)
    print(f"Trained {args.task} ({config.classifier}, {config.vector_mode}); saved {len(written)} artifacts")
    return 0


def cmd_eval(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = PipelineService.ensure_labels(_load_docs(args, config), config)
    bundle = _bundle(args)
    out_dir = Path(config.out_dir)
    task = args.task

    if task == "structure":
        reports = PipelineService.compare_structure_modes(docs, bundle, config.threads)
        write_text(
            out_dir / "eval_structure.json",
            canonical_json({name: report.to_dict() for name, report in reports.items()}),
        )
        print(format_comparison(reports), end="")
        return 0

    if task == "semantic":
        if bundle.semantic is None:
            raise UsageError("Semantic evaluation needs a trained semantic model in --model-dir")
        ontology = bundle.semantic.ontology
        examples = SemanticService.training_examples(PipelineService.oracle_trees(docs, config.threads), ontology)
        report = bundle.semantic.evaluate(examples)
        write_text(out_dir / "eval_semantic.json", canonical_json(report.to_dict()))
        print(format_eval_report(report, lambda c: ontology.classes[c]), end="")
        return 0

    if args.cross_validate:
        featurizer = bundle.featurizer or PipelineService.fit_featurizer(docs, config)
        ds = CorpusService.build_line_dataset(docs, featurizer, task, config.vector_mode, config.threads)
        result = cross_validate(
            config.classifier,
            ds,
            k=config.folds,
            seed=config.seed,
            hyperparams=config.classifier_hyperparams(config.classifier),
        )
        name = f"cv_{task}_{result.kind}_{config.vector_mode}.json"
        write_text(out_dir / name, canonical_json(result.to_dict()))
        print(format_cross_validation(result), end="")
        print(format_eval_report(result.pooled), end="")
        return 0

    model = getattr(bundle, f"{task}_model")
    if model is None or bundle.featurizer is None:
        raise UsageError(f"No trained {task} model and featurizer in --model-dir")
    ds = CorpusService.build_line_dataset(docs, bundle.featurizer, task, model.mode or "combined", config.threads)
    report = evaluate(model, ds)
    write_text(out_dir / f"eval_{task}.json", canonical_json(report.to_dict()))
    print(format_eval_report(report), end="")
    return 0


def cmd_structure(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = _load_docs(args, config)
    trees = _structure_trees(docs, _bundle(args), config)
    _write_trees(trees, Path(config.out_dir))
    print(f"Recovered {sum(len(t.sections()) for t in trees)} sections in {len(trees)} documents")
    return 0


def cmd_semantics(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = _load_docs(args, config)
    bundle = _bundle(args)
    ontology = load_ontology(config.ontology)
    trees = _structure_trees(docs, bundle, config)
    out_dir = Path(config.out_dir)

    if args.discover:
        headers = [section.title for tree in trees for section in tree.iter_sections()]
        for header, count, target in SemanticService.suggest_aliases(headers, ontology)[: args.discover]:
            print(f"{count:6d}  {header}  -> {target or '-'}")

    labeled = 0
    for tree in trees:
        labeled += SemanticService.label_tree(tree, ontology, bundle.semantic)
        graph = SemanticService.emit_ontology_annotation(tree, ontology)
        write_text(
            out_dir / "annotations" / f"{output_name(tree.doc_id)}.nt",
            SemanticService.annotation_ntriples(graph),
        )
    _write_trees(trees, out_dir)
    print(f"Labeled {labeled} of {sum(len(t.sections()) for t in trees)} sections")
    return 0


def cmd_topics(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = _load_docs(args, config)
    bundle = _bundle(args)
    trees = _structure_trees(docs, bundle, config)
    model = PipelineService.train_topics(trees, config)
    if args.model_dir:
        ModelBundle(topics=model).save(args.model_dir)

    report: dict[str, Any] = {
        "K": model.K,
        "log_likelihood": model.log_likelihood,
        "top_terms": TopicService.top_terms(model, args.top),
        "vocabulary": len(model.dictionary),
    }
    sections = PipelineService.section_tokens(trees, model.ngram)
    try:
        halves = TopicService.half_split_similarity_eval(
            model, sections, seed=config.seed, iterations=config.lda_infer_iterations
        )
        report["half_split"] = halves.to_dict()
    except ContractError as e:
        logger.warning("Skipping half-split evaluation: %s", e)
    write_text(Path(config.out_dir) / "topics.json", canonical_json(report, decimals=4))
    print(format_top_terms(report["top_terms"]), end="")
    return 0


def cmd_summarize(args: argparse.Namespace, config: PipelineConfig) -> int:
    files = PipelineService.discover_structure_files(args.inputs)
    summarized = sum(
        map_documents(lambda path: PipelineService.summarize_structure_file(path, config), files, config.threads)
    )
    print(f"Summarized {summarized} sections in {len(files)} documents")
    return 0


def cmd_pipeline(args: argparse.Namespace, config: PipelineConfig) -> int:
    docs = _load_docs(args, config)
    report = PipelineService.run_pipeline(docs, ModelBundle.load(args.model_dir), config)
    totals = report.to_dict()["totals"]
    print(
        f"Processed {len(report.documents)} documents: {totals['sections']} sections, "
        f"{totals['classified_sections']} classified, {totals['summarized_sections']} summarized"
    )
    return 0


def cmd_config(args: argparse.Namespace, config: PipelineConfig) -> int:
    print(default_config_yaml(config), end="")
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace, PipelineConfig], int]] = {
    "ingest": cmd_ingest,
    "gen": cmd_gen,
    "featurize": cmd_featurize,
    "train": cmd_train,
    "eval": cmd_eval,
    "structure": cmd_structure,
    "semantics": cmd_semantics,
    "topics": cmd_topics,
    "summarize": cmd_summarize,
    "pipeline": cmd_pipeline,
    "config": cmd_config,
}


@handle_cli_errors
def run(args: argparse.Namespace) -> int:
    config = _config(args)
    logging.basicConfig(level=config.log_level, format=LOG_FORMAT)
    logger.debug("Running %s with %s", args.command, config)
    return COMMANDS[args.command](args, config)


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
