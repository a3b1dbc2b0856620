"""
Line-record CSV reader and writer.

Columns are fixed:
``doc_id,page_number,text,font_size,font_weight,font_family,x_left,x_right,
y_top,y_bottom,page_width,page_height,label,record,toc``. Floats are written with
``repr`` so save -> load -> save reproduces the same bytes; ``label`` may be
empty or the column may be missing altogether.

Every document starts with one ``record=document`` row that carries only its
``doc_id`` and, in ``toc``, the bookmark entries as a JSON array (empty cell
for a document without bookmarks). It keeps documents without lines and
their TOC in the file. Line rows leave ``record`` and ``toc`` empty; files
without those columns load as plain line records.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Iterable
from typing import IO, Any

from marshmallow import ValidationError

from ..models.document import BookmarkEntry, Document, LineRecord, reading_order_key
from ..utils.error_handler import ParseError, SchemaError
from ..utils.serialization_utils import canonical_json
from ..utils.validation_schemas import BookmarkSchema, LineRecordRowSchema
from .stats import compute_page_statistics

logger = logging.getLogger(__name__)

COLUMNS = (
    "doc_id",
    "page_number",
    "text",
    "font_size",
    "font_weight",
    "font_family",
    "x_left",
    "x_right",
    "y_top",
    "y_bottom",
    "page_width",
    "page_height",
    "label",
    "record",
    "toc",
)
LINE_COLUMNS = COLUMNS[:13]
REQUIRED_COLUMNS = LINE_COLUMNS[:-1]
DOCUMENT_RECORD = "document"

_row_schema = LineRecordRowSchema()
_bookmark_schema = BookmarkSchema(many=True)


def _row(doc_id: str, line: LineRecord) -> list[str]:
    return [
        doc_id,
        str(line.page_number),
        line.text,
        repr(float(line.font_size)),
        repr(float(line.font_weight)),
        line.font_family,
        repr(float(line.x_left)),
        repr(float(line.x_right)),
        repr(float(line.y_top)),
        repr(float(line.y_bottom)),
        repr(float(line.page_width)),
        repr(float(line.page_height)),
        "" if line.label is None else str(line.label),
        "",
        "",
    ]


def _document_row(doc: Document) -> list[str]:
    toc = "" if doc.toc is None else canonical_json([e.to_dict() for e in doc.toc], indent=None)
    return [doc.doc_id, *[""] * (len(COLUMNS) - 3), DOCUMENT_RECORD, toc]


def bookmarks_from_json(text: str) -> list[BookmarkEntry]:
    """Parse a JSON array of ``{title, depth, order}`` bookmark entries."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"Bookmark JSON is invalid: {e}") from e
    if not isinstance(data, list):
        raise SchemaError("Bookmark JSON must be an array of entries")
    try:
        loaded = _bookmark_schema.load(data)
    except ValidationError as e:
        raise SchemaError(f"Invalid bookmark entries: {e.messages}") from e
    return [BookmarkEntry(**item) for item in loaded]


def save_line_records(docs: Document | Iterable[Document], sink: IO[str]) -> None:
    """Write one or more documents as line-record CSV rows."""
    if isinstance(docs, Document):
        docs = [docs]
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(COLUMNS)
    for doc in docs:
        writer.writerow(_document_row(doc))
        for line in doc.lines:
            writer.writerow(_row(doc.doc_id, line))


def dumps_line_records(docs: Document | Iterable[Document]) -> str:
    buffer = io.StringIO()
    save_line_records(docs, buffer)
    return buffer.getvalue()


def _read_rows(source: IO[str] | str) -> list[tuple[int, dict[str, Any]]]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.DictReader(stream, strict=True)
    try:
        header = reader.fieldnames
        if header is None:
            return []
        missing = [column for column in REQUIRED_COLUMNS if column not in header]
        if missing:
            raise SchemaError(f"Line CSV is missing required column(s): {', '.join(missing)}")
        rows = []
        for row in reader:
            if None in row:
                raise ParseError("Row has more fields than the header", line=reader.line_num)
            rows.append((reader.line_num, row))
    except csv.Error as e:
        raise ParseError(f"Malformed CSV: {e}", line=reader.line_num) from e
    return rows


def _load_row(line_num: int, row: dict[str, Any]) -> tuple[str, LineRecord]:
    data = {column: row[column] for column in LINE_COLUMNS if column in row}
    if any(value is None for value in data.values()):
        raise ParseError("Row has fewer fields than the header", line=line_num)
    try:
        loaded = _row_schema.load(data)
    except ValidationError as e:
        raise SchemaError(f"Invalid line record in row {line_num}: {e.messages}") from e
    doc_id = loaded.pop("doc_id")
    return doc_id, LineRecord(**loaded)


def _load_document_row(
    line_num: int, row: dict[str, Any]
) -> tuple[str, tuple[BookmarkEntry, ...] | None]:
    doc_id = row.get("doc_id") or ""
    if not doc_id:
        raise SchemaError(f"Document row {line_num} has no doc_id")
    cell = row.get("toc") or ""
    if not cell:
        return doc_id, None
    try:
        return doc_id, tuple(bookmarks_from_json(cell))
    except SchemaError as e:
        raise SchemaError(f"Invalid toc in row {line_num}: {e.message}") from e


def load_line_record_corpus(source: IO[str] | str) -> list[Document]:
    """Load every document in a line CSV, in order of first appearance."""
    grouped: dict[str, list[LineRecord]] = {}
    tocs: dict[str, tuple[BookmarkEntry, ...] | None] = {}
    for line_num, row in _read_rows(source):
        record = row.get("record") or ""
        if record == DOCUMENT_RECORD:
            doc_id, toc = _load_document_row(line_num, row)
            if doc_id in tocs:
                raise SchemaError(f"Document {doc_id} has a second document row at row {line_num}")
            grouped.setdefault(doc_id, [])
            tocs[doc_id] = toc
        elif record:
            raise SchemaError(f"Unknown record type {record!r} in row {line_num}")
        else:
            doc_id, line = _load_row(line_num, row)
            grouped.setdefault(doc_id, []).append(line)

    documents = []
    for doc_id, lines in grouped.items():
        lines.sort(key=reading_order_key)
        doc = Document(doc_id=doc_id, lines=tuple(lines), toc=tocs.get(doc_id))
        documents.append(compute_page_statistics(doc))
    logger.debug("Loaded %d document(s) from line CSV", len(documents))
    return documents


def load_line_records(source: IO[str] | str) -> Document:
    """Load a single-document line CSV."""
    documents = load_line_record_corpus(source)
    if not documents:
        return Document(doc_id="document")
    if len(documents) > 1:
        raise SchemaError(
            f"Expected one document, found {len(documents)}: "
            f"{', '.join(d.doc_id for d in documents)}"
        )
    return documents[0]


__all__ = [
    "COLUMNS",
    "LINE_COLUMNS",
    "REQUIRED_COLUMNS",
    "bookmarks_from_json",
    "save_line_records",
    "dumps_line_records",
    "load_line_records",
    "load_line_record_corpus",
]
