"""
Domain models for docstruct.
"""

from .dataset import LabeledDataset
from .document import (
    BOLD_WEIGHT,
    NORMAL_WEIGHT,
    BookmarkEntry,
    Document,
    LineRecord,
    PageStats,
    reading_order_key,
)
from .ontology import UNKNOWN_SECTION, OntologyClassSet, load_ontology, ontology_from_dict
from .section import SectionNode, TocTree

__all__ = [
    "BOLD_WEIGHT",
    "NORMAL_WEIGHT",
    "BookmarkEntry",
    "Document",
    "LabeledDataset",
    "LineRecord",
    "OntologyClassSet",
    "PageStats",
    "SectionNode",
    "TocTree",
    "UNKNOWN_SECTION",
    "load_ontology",
    "ontology_from_dict",
    "reading_order_key",
]
