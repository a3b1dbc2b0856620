"""
TETML reader and writer.

Only the subset needed for line assembly is consumed: ``Page`` (number,
width, height), ``Word`` with its ``Text`` and ``Box`` (llx, lly, urx, ury)
and the per-character ``Glyph`` elements (font, size, x, y, width), plus the
``Font`` resources (id, name, weight). Everything else is ignored and
namespaces are stripped.

TETML coordinates grow upward from the bottom of the page; lines are stored
top-down (``y_top = height - ury``).
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from itertools import groupby
from typing import IO

from lxml import etree

from ..models.document import BOLD_WEIGHT, NORMAL_WEIGHT, Document, LineRecord, reading_order_key
from ..utils.error_handler import ParseError, SchemaError
from .stats import compute_page_statistics

logger = logging.getLogger(__name__)

TET_NAMESPACE = "http://www.pdflib.com/XML/TET5/TET-5.0"

# Two words share a line when their vertical overlap covers this fraction
# of the smaller box height.
LINE_OVERLAP_RATIO = 0.5


@dataclass(frozen=True)
class _Font:
    family: str
    weight: float


@dataclass
class _Word:
    text: str
    x_left: float
    x_right: float
    y_top: float
    y_bottom: float
    glyphs: list[tuple[float, str, float]]  # (size, family, weight) per character

    @property
    def height(self) -> float:
        return self.y_bottom - self.y_top


def _local(tag: object) -> str:
    if not isinstance(tag, str):
        return ""
    return tag.rsplit("}", 1)[-1]


def _children(element: etree._Element, name: str) -> list[etree._Element]:
    return [child for child in element if _local(child.tag) == name]


def _float_attr(element: etree._Element, name: str) -> float:
    raw = element.get(name)
    where = f"<{_local(element.tag)}> at line {element.sourceline}"
    if raw is None:
        raise SchemaError(f"Missing required attribute '{name}' on {where}")
    try:
        return float(raw)
    except ValueError as e:
        raise SchemaError(f"Attribute '{name}' on {where} is not a number: {raw!r}") from e


def _font_weight(font: etree._Element) -> float:
    raw = font.get("weight")
    if raw is not None:
        lowered = raw.strip().lower()
        if lowered == "bold":
            return BOLD_WEIGHT
        if lowered in ("normal", "regular"):
            return NORMAL_WEIGHT
        try:
            return float(raw)
        except ValueError as e:
            raise SchemaError(f"Font {font.get('id')} has an invalid weight {raw!r}") from e
    name = (font.get("name") or "").lower()
    return BOLD_WEIGHT if "bold" in name or "black" in name else NORMAL_WEIGHT


def _read_fonts(root: etree._Element) -> dict[str, _Font]:
    fonts = {}
    for element in root.iter():
        if _local(element.tag) != "Font":
            continue
        font_id = element.get("id")
        if font_id is None:
            raise SchemaError(
                f"Missing required attribute 'id' on <Font> at line {element.sourceline}"
            )
        fonts[font_id] = _Font(family=element.get("name") or font_id, weight=_font_weight(element))
    return fonts


def _read_word(word: etree._Element, page_height: float, fonts: dict[str, _Font]) -> _Word | None:
    boxes = _children(word, "Box")
    if not boxes:
        raise SchemaError(f"Missing required element 'Box' in <Word> at line {word.sourceline}")

    llx = min(_float_attr(box, "llx") for box in boxes)
    lly = min(_float_attr(box, "lly") for box in boxes)
    urx = max(_float_attr(box, "urx") for box in boxes)
    ury = max(_float_attr(box, "ury") for box in boxes)

    glyphs = []
    glyph_text = []
    for box in boxes:
        for glyph in _children(box, "Glyph"):
            font_id = glyph.get("font")
            if font_id is None:
                raise SchemaError(
                    f"Missing required attribute 'font' on <Glyph> at line {glyph.sourceline}"
                )
            font = fonts.get(font_id)
            if font is None:
                raise SchemaError(
                    f"Attribute 'font' on <Glyph> at line {glyph.sourceline} "
                    f"references unknown font {font_id!r}"
                )
            glyphs.append((_float_attr(glyph, "size"), font.family, font.weight))
            glyph_text.append(glyph.text or "")

    text_elements = _children(word, "Text")
    text = text_elements[0].text if text_elements and text_elements[0].text else "".join(glyph_text)
    text = text.strip()
    if not text:
        return None
    if not glyphs:
        raise SchemaError(f"Missing required element 'Glyph' in <Word> at line {word.sourceline}")

    return _Word(
        text=text,
        x_left=llx,
        x_right=urx,
        y_top=page_height - ury,
        y_bottom=page_height - lly,
        glyphs=glyphs,
    )


def _mode(values: list) -> object:
    """Most frequent value; ties go to the value seen first."""
    counts = Counter(values)
    best = max(counts.values())
    for value in values:
        if counts[value] == best:
            return value
    raise ValueError("mode of an empty sequence")


def _shares_line(word: _Word, top: float, bottom: float) -> bool:
    overlap = min(word.y_bottom, bottom) - max(word.y_top, top)
    smaller = min(word.height, bottom - top)
    if smaller <= 0:
        return overlap >= 0
    return overlap >= LINE_OVERLAP_RATIO * smaller


def assemble_lines(
    words: list[_Word], page_number: int, page_width: float, page_height: float
) -> list[LineRecord]:
    """Group the words of one page into lines and pick each line's font by mode."""
    groups: list[list[_Word]] = []
    extents: list[tuple[float, float]] = []
    for word in sorted(words, key=lambda w: ((w.y_top + w.y_bottom) / 2, w.x_left)):
        for i in range(len(groups) - 1, -1, -1):
            top, bottom = extents[i]
            if _shares_line(word, top, bottom):
                groups[i].append(word)
                extents[i] = (min(top, word.y_top), max(bottom, word.y_bottom))
                break
        else:
            groups.append([word])
            extents.append((word.y_top, word.y_bottom))

    lines = []
    for group in groups:
        group.sort(key=lambda w: w.x_left)
        glyphs = [g for w in group for g in w.glyphs]
        lines.append(
            LineRecord(
                text=" ".join(w.text for w in group),
                page_number=page_number,
                font_size=float(_mode([g[0] for g in glyphs])),
                font_weight=float(_mode([g[2] for g in glyphs])),
                font_family=str(_mode([g[1] for g in glyphs])),
                x_left=min(w.x_left for w in group),
                x_right=max(w.x_right for w in group),
                y_top=min(w.y_top for w in group),
                y_bottom=max(w.y_bottom for w in group),
                page_width=page_width,
                page_height=page_height,
            )
        )
    return lines


def parse_tetml(source: IO[bytes] | bytes, doc_id: str | None = None) -> Document:
    """Parse a TETML byte stream into a Document with page statistics.

    Raises:
        ParseError: malformed XML, with line and offset.
        SchemaError: a required attribute is missing or not numeric.
    """
    data = source if isinstance(source, bytes) else source.read()
    parser = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=True)
    try:
        root = etree.fromstring(data, parser=parser)
    except etree.XMLSyntaxError as e:
        line, column = e.position if e.position else (None, None)
        raise ParseError(f"Malformed TETML: {e.msg}", line=line, offset=column) from e

    if doc_id is None:
        documents = [el for el in root.iter() if _local(el.tag) == "Document"]
        doc_id = (documents[0].get("filename") if documents else None) or "document"

    fonts = _read_fonts(root)
    lines: list[LineRecord] = []
    for page in (el for el in root.iter() if _local(el.tag) == "Page"):
        number = int(_float_attr(page, "number"))
        width = _float_attr(page, "width")
        height = _float_attr(page, "height")
        words = []
        for element in page.iter():
            if _local(element.tag) == "Word":
                word = _read_word(element, height, fonts)
                if word is not None:
                    words.append(word)
        lines.extend(assemble_lines(words, number, width, height))

    lines.sort(key=reading_order_key)
    logger.debug("Parsed TETML document %s: %d lines", doc_id, len(lines))
    return compute_page_statistics(Document(doc_id=doc_id, lines=tuple(lines)))


def _fmt(value: float) -> str:
    return repr(float(value))


def write_tetml(doc: Document) -> bytes:
    """Render ``doc`` in the consumed TETML subset, one Glyph per character.

    Each line becomes one ``Para``; characters are spread evenly over the
    line's width. Lines with empty text have no glyphs and are left out.
    """
    root = etree.Element("TET", nsmap={None: TET_NAMESPACE})
    document = etree.SubElement(root, "Document", filename=doc.doc_id)

    font_ids: dict[tuple[str, float], str] = {}
    for line in doc.lines:
        key = (line.font_family, line.font_weight)
        if key not in font_ids:
            font_ids[key] = f"F{len(font_ids)}"
    resources = etree.SubElement(document, "Resources")
    fonts = etree.SubElement(resources, "Fonts")
    for (family, weight), font_id in font_ids.items():
        etree.SubElement(fonts, "Font", id=font_id, name=family, weight=_fmt(weight))

    pages = etree.SubElement(document, "Pages")
    for page_number, page_lines in groupby(doc.lines, key=lambda line: line.page_number):
        page_lines = list(page_lines)
        first = page_lines[0]
        page = etree.SubElement(
            pages,
            "Page",
            number=str(page_number),
            width=_fmt(first.page_width),
            height=_fmt(first.page_height),
        )
        content = etree.SubElement(page, "Content")
        for line in page_lines:
            if not line.text.strip():
                logger.debug("Skipping empty line on page %d of %s", page_number, doc.doc_id)
                continue
            _write_line(content, line, font_ids[(line.font_family, line.font_weight)])

    return etree.tostring(root, xml_declaration=True, encoding="UTF-8", pretty_print=True)


def _write_line(content: etree._Element, line: LineRecord, font_id: str) -> None:
    para = etree.SubElement(content, "Para")
    text = line.text
    char_width = (line.x_right - line.x_left) / len(text)
    lly = line.page_height - line.y_bottom
    ury = line.page_height - line.y_top

    position = 0
    for token in text.split(" "):
        if not token:
            position += 1
            continue
        start = line.x_left + position * char_width
        end = line.x_left + (position + len(token)) * char_width
        if position + len(token) == len(text):
            end = line.x_right
        word = etree.SubElement(para, "Word")
        etree.SubElement(word, "Text").text = token
        box = etree.SubElement(
            word, "Box", llx=_fmt(start), lly=_fmt(lly), urx=_fmt(end), ury=_fmt(ury)
        )
        for offset, char in enumerate(token):
            glyph = etree.SubElement(
                box,
                "Glyph",
                font=font_id,
                size=_fmt(line.font_size),
                x=_fmt(start + offset * char_width),
                y=_fmt(lly),
                width=_fmt(char_width),
            )
            glyph.text = char
        position += len(token) + 1


__all__ = ["TET_NAMESPACE", "LINE_OVERLAP_RATIO", "assemble_lines", "parse_tetml", "write_tetml"]
