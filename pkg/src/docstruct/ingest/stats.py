"""
Per-page layout statistics.
"""

from dataclasses import replace
from itertools import groupby

import numpy as np

from ..models.document import Document, LineRecord, PageStats


def page_statistics(page_number: int, lines: list[LineRecord]) -> PageStats:
    """Averages for one page; ``lines`` must be in reading order.

    A single-line page has line spacing 0.
    """
    sizes = np.array([line.font_size for line in lines], dtype=float)
    weights = np.array([line.font_weight for line in lines], dtype=float)
    baselines = np.array([line.baseline for line in lines], dtype=float)
    lefts = np.array([line.x_left for line in lines], dtype=float)

    gaps = np.diff(baselines)
    spacing = float(gaps.mean()) if gaps.size else 0.0
    return PageStats(
        page_number=page_number,
        avg_font_size=float(sizes.mean()),
        avg_font_weight=float(weights.mean()),
        avg_line_spacing=max(spacing, 0.0),
        avg_indentation=float((lefts - lefts.min()).mean()),
    )


def compute_page_statistics(doc: Document) -> Document:
    """Return ``doc`` with one PageStats per page that carries lines."""
    pages = [
        page_statistics(page_number, list(page_lines))
        for page_number, page_lines in groupby(doc.lines, key=lambda line: line.page_number)
    ]
    return replace(doc, pages=tuple(sorted(pages, key=lambda p: p.page_number)))


__all__ = ["page_statistics", "compute_page_statistics"]
