"""Shared fixtures for the docstruct test suite."""

import pytest

from src.docstruct.config import PipelineConfig
from src.docstruct.models.document import BookmarkEntry, Document, LineRecord
from src.docstruct.models.ontology import load_ontology
from src.docstruct.ingest import compute_page_statistics
from src.docstruct.synth import CorpusSpec, generate_corpus


def make_line(
    text,
    y_bottom=100.0,
    page=1,
    size=10.0,
    weight=400.0,
    family="Times-Roman",
    x_left=72.0,
    label=None,
):
    """A LineRecord on a US-letter page with sensible defaults."""
    return LineRecord(
        text=text,
        page_number=page,
        font_size=size,
        font_weight=weight,
        font_family=family,
        x_left=x_left,
        x_right=x_left + 5.0 * max(len(text), 1),
        y_top=y_bottom - size,
        y_bottom=y_bottom,
        page_width=612.0,
        page_height=792.0,
        label=label,
    )


def make_document(texts, labels=None, doc_id="doc", toc=None, spacing=12.0):
    """One-page document whose lines sit ``spacing`` points apart."""
    labels = labels if labels is not None else [None] * len(texts)
    lines = tuple(
        make_line(text, y_bottom=100.0 + i * spacing, label=label)
        for i, (text, label) in enumerate(zip(texts, labels))
    )
    return compute_page_statistics(
        Document(doc_id=doc_id, lines=lines, toc=tuple(toc) if toc is not None else None)
    )


@pytest.fixture
def line_factory():
    return make_line


@pytest.fixture
def document_factory():
    return make_document


@pytest.fixture
def small_document():
    """Preamble line, two top-level sections and one subsection."""
    texts = [
        "A. Author and B. Author",
        "1 Introduction",
        "We study the problem of structure recovery.",
        "2 Approach",
        "Our approach uses layout features.",
        "2.1 Features",
        "Features are computed per line.",
    ]
    labels = [0, 1, 0, 1, 0, 2, 0]
    toc = [
        BookmarkEntry("1 Introduction", 1, 0),
        BookmarkEntry("2 Approach", 1, 1),
        BookmarkEntry("2.1 Features", 2, 2),
    ]
    return make_document(texts, labels, doc_id="small", toc=toc)


@pytest.fixture(scope="session")
def arxiv_ontology():
    return load_ontology("arxiv")


@pytest.fixture(scope="session")
def synthetic_corpus():
    """Twelve zero-noise synthetic documents, shared across the session."""
    return generate_corpus(CorpusSpec(n_docs=12, seed=7))


@pytest.fixture(scope="session")
def synthetic_documents(synthetic_corpus):
    return [generated.document for generated in synthetic_corpus]


@pytest.fixture
def fast_config(tmp_path):
    """Config with short training runs and permissive topic filters."""
    return PipelineConfig(
        out_dir=str(tmp_path / "out"),
        threads=1,
        seed=3,
        classifier="nb",
        svm_epochs=5,
        k_topics=3,
        lda_iterations=20,
        lda_infer_iterations=10,
        lda_min_sections=2,
        lda_max_fraction=0.6,
    )
