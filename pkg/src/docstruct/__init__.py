"""
docstruct - logical and semantic structure recovery for positional-text documents.

Detects section headers, classifies header levels, builds the table of
contents and annotates every section with an ontology class, topic concepts
and an extractive summary.
"""

__version__ = "0.1.0"
__title__ = "docstruct"
__description__ = (
    "Section header detection, TOC induction and semantic section labeling "
    "for positional-text documents"
)
__author__ = "docstruct Contributors"
__license__ = "MIT"

__all__ = [
    "__version__",
    "__title__",
    "__description__",
    "__author__",
    "__license__",
]
