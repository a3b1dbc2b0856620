"""
Positional-text ingestion: TETML and line-record CSV.
"""

from __future__ import annotations

import io
from typing import IO

from ..models.document import Document
from ..utils.error_handler import ContractError, ParseError
from .line_csv import (
    COLUMNS,
    bookmarks_from_json,
    dumps_line_records,
    load_line_record_corpus,
    load_line_records,
    save_line_records,
)
from .stats import compute_page_statistics, page_statistics
from .tetml import parse_tetml, write_tetml

INPUT_FORMATS = ("tetml", "line_csv")


def parse_positional_document(
    source: IO[bytes] | bytes, format: str, doc_id: str | None = None
) -> Document:
    """Parse a byte stream in one of :data:`INPUT_FORMATS`."""
    if format == "tetml":
        return parse_tetml(source, doc_id=doc_id)
    if format == "line_csv":
        data = source if isinstance(source, bytes) else source.read()
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"Line CSV is not valid UTF-8: {e}", offset=e.start) from e
        doc = load_line_records(io.StringIO(text, newline=""))
        return doc if doc_id is None else Document(doc_id, doc.lines, doc.pages, doc.toc)
    raise ContractError(f"Unknown input format {format!r}; expected one of {INPUT_FORMATS}")


__all__ = [
    "COLUMNS",
    "bookmarks_from_json",
    "INPUT_FORMATS",
    "compute_page_statistics",
    "dumps_line_records",
    "load_line_record_corpus",
    "load_line_records",
    "page_statistics",
    "parse_positional_document",
    "parse_tetml",
    "save_line_records",
    "write_tetml",
]
