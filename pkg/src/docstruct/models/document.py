"""
Positional-text document model: lines, per-page statistics and bookmarks.

Coordinates follow a top-down axis: ``y`` grows from the top of the page, a
line's baseline is ``y_bottom`` and ``y_top <= y_bottom``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any

from ..utils.error_handler import ContractError, SchemaError

NORMAL_WEIGHT = 400.0
BOLD_WEIGHT = 700.0


@dataclass(frozen=True)
class LineRecord:
    """One assembled text line with its layout attributes."""

    text: str
    page_number: int
    font_size: float
    font_weight: float
    font_family: str
    x_left: float
    x_right: float
    y_top: float
    y_bottom: float
    page_width: float
    page_height: float
    label: int | None = None

    def __post_init__(self) -> None:
        if self.page_number < 1:
            raise SchemaError(f"page_number must be positive, got {self.page_number}")
        for name in ("font_size", "page_width", "page_height", "font_weight"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise SchemaError(f"{name} must be a positive number, got {value}")
        if self.x_left > self.x_right:
            raise SchemaError(f"x_left {self.x_left} exceeds x_right {self.x_right}")
        if self.y_top > self.y_bottom:
            raise SchemaError(f"y_top {self.y_top} exceeds y_bottom {self.y_bottom}")
        if self.label is not None and self.label < 0:
            raise SchemaError(f"label must be >= 0, got {self.label}")

    @property
    def baseline(self) -> float:
        return self.y_bottom

    @property
    def height(self) -> float:
        return self.y_bottom - self.y_top

    @property
    def is_bold(self) -> bool:
        return self.font_weight >= BOLD_WEIGHT or "bold" in self.font_family.lower()

    def with_label(self, label: int | None) -> LineRecord:
        return replace(self, label=label)

    def to_dict(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "page_number": self.page_number,
            "font_size": self.font_size,
            "font_weight": self.font_weight,
            "font_family": self.font_family,
            "x_left": self.x_left,
            "x_right": self.x_right,
            "y_top": self.y_top,
            "y_bottom": self.y_bottom,
            "page_width": self.page_width,
            "page_height": self.page_height,
            "label": self.label,
        }


@dataclass(frozen=True)
class PageStats:
    page_number: int
    avg_font_size: float
    avg_font_weight: float
    avg_line_spacing: float
    avg_indentation: float


@dataclass(frozen=True)
class BookmarkEntry:
    """A TOC entry: title, depth (1 = top level) and position in the TOC."""

    title: str
    depth: int
    order: int

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise SchemaError(f"bookmark depth must be >= 1, got {self.depth}")

    def to_dict(self) -> dict[str, Any]:
        return {"title": self.title, "depth": self.depth, "order": self.order}


@dataclass(frozen=True)
class Document:
    """An immutable document: lines in reading order plus page statistics."""

    doc_id: str
    lines: tuple[LineRecord, ...] = ()
    pages: tuple[PageStats, ...] = ()
    toc: tuple[BookmarkEntry, ...] | None = None

    @cached_property
    def _pages_by_number(self) -> dict[int, PageStats]:
        return {p.page_number: p for p in self.pages}

    def page_stats(self, page_number: int) -> PageStats:
        try:
            return self._pages_by_number[page_number]
        except KeyError as e:
            raise ContractError(
                f"Document {self.doc_id} has no statistics for page {page_number}"
            ) from e

    @property
    def labels(self) -> list[int | None]:
        return [line.label for line in self.lines]

    @property
    def is_labeled(self) -> bool:
        return bool(self.lines) and all(line.label is not None for line in self.lines)

    def with_labels(self, labels: list[int | None]) -> Document:
        if len(labels) != len(self.lines):
            raise ContractError(
                f"Expected {len(self.lines)} labels for {self.doc_id}, got {len(labels)}"
            )
        lines = tuple(line.with_label(label) for line, label in zip(self.lines, labels, strict=True))
        return replace(self, lines=lines)

    def with_toc(self, toc: list[BookmarkEntry] | tuple[BookmarkEntry, ...] | None) -> Document:
        return replace(self, toc=tuple(toc) if toc is not None else None)


def reading_order_key(line: LineRecord) -> tuple[int, float, float]:
    """Sort key for reading order: page, then baseline, then left edge."""
    return (line.page_number, line.y_bottom, line.x_left)


__all__ = [
    "NORMAL_WEIGHT",
    "BOLD_WEIGHT",
    "LineRecord",
    "PageStats",
    "BookmarkEntry",
    "Document",
    "reading_order_key",
]
