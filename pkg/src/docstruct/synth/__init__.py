"""
Synthetic labeled corpora with planted structure.
"""

from .generator import (
    WRITER_FORMATS,
    CorpusGenerator,
    CorpusSpec,
    GeneratedDocument,
    PlantedSection,
    corpus_spec_from_dict,
    generate_corpus,
    load_corpus_spec,
    write_corpus,
)
from .vocabulary import CANONICAL_ORDER, CLASS_WORDS, DOMAIN_WORDS

__all__ = [
    "CANONICAL_ORDER",
    "CLASS_WORDS",
    "DOMAIN_WORDS",
    "WRITER_FORMATS",
    "CorpusGenerator",
    "CorpusSpec",
    "GeneratedDocument",
    "PlantedSection",
    "corpus_spec_from_dict",
    "generate_corpus",
    "load_corpus_spec",
    "write_corpus",
]
