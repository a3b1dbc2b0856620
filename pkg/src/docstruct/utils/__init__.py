"""
Utility functions for docstruct: errors, serialization, text helpers and the
document work pool. Table formatting lives in ``utils.formatting``.
"""

from .concurrency import map_documents
from .error_handler import (
    ContractError,
    DocStructError,
    ModelFormatError,
    ParseError,
    SchemaError,
    UsageError,
    handle_cli_errors,
)
from .serialization_utils import canonical_json, read_container, sanitize_floats, write_container
from .text_utils import header_similarity, normalize_header, strip_numbering, word_tokens

__all__ = [
    "map_documents",
    "DocStructError",
    "ParseError",
    "SchemaError",
    "ContractError",
    "ModelFormatError",
    "UsageError",
    "handle_cli_errors",
    "canonical_json",
    "sanitize_floats",
    "read_container",
    "write_container",
    "header_similarity",
    "normalize_header",
    "strip_numbering",
    "word_tokens",
]
