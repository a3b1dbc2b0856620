"""
Section tree model.

A ``TocTree`` holds the preamble (lines before the first header) and the
level-1 ``SectionNode`` roots. Every document line appears exactly once in a
tree, either in the preamble, as a header or as a body line.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Any

from ..utils.error_handler import SchemaError
from .document import LineRecord


@dataclass
class SectionNode:
    header: LineRecord
    header_line_id: int
    level: int
    body: list[LineRecord] = field(default_factory=list)
    body_line_ids: list[int] = field(default_factory=list)
    children: list[SectionNode] = field(default_factory=list)
    ontology_class: str | None = None
    concepts: list[str] | None = None
    summary: str | None = None

    @property
    def title(self) -> str:
        return self.header.text

    @property
    def page(self) -> int:
        return self.header.page_number

    @property
    def body_text(self) -> str:
        return "\n".join(line.text for line in self.body)

    @property
    def text(self) -> str:
        """Header followed by body text."""
        return "\n".join([self.header.text, *(line.text for line in self.body)])

    def iter_sections(self) -> Iterator[SectionNode]:
        """This node and its descendants in pre-order."""
        yield self
        for child in self.children:
            yield from child.iter_sections()


@dataclass
class TocTree:
    doc_id: str
    roots: list[SectionNode] = field(default_factory=list)
    preamble: list[LineRecord] = field(default_factory=list)
    preamble_line_ids: list[int] = field(default_factory=list)

    def iter_sections(self) -> Iterator[SectionNode]:
        for root in self.roots:
            yield from root.iter_sections()

    def sections(self) -> list[SectionNode]:
        return list(self.iter_sections())

    def flatten(self) -> list[int]:
        """Line ids in tree order: preamble, then each section's header, body, children."""
        ids = list(self.preamble_line_ids)
        for node in self.iter_sections():
            ids.append(node.header_line_id)
            ids.extend(node.body_line_ids)
        return ids

    def line_count(self) -> int:
        return len(self.preamble_line_ids) + sum(
            1 + len(node.body_line_ids) for node in self.iter_sections()
        )

    def to_dict(self) -> dict[str, Any]:
        """Structure JSON: section outline plus the line records it references."""
        by_id: dict[int, LineRecord] = {}
        for line_id, line in zip(self.preamble_line_ids, self.preamble, strict=True):
            by_id[line_id] = line
        for node in self.iter_sections():
            by_id[node.header_line_id] = node.header
            for line_id, line in zip(node.body_line_ids, node.body, strict=True):
                by_id[line_id] = line

        return {
            "doc_id": self.doc_id,
            "lines": [by_id[i].to_dict() for i in sorted(by_id)],
            "preamble": [line.text for line in self.preamble],
            "preamble_line_ids": list(self.preamble_line_ids),
            "sections": [_node_to_dict(root) for root in self.roots],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TocTree:
        try:
            lines = [LineRecord(**record) for record in data["lines"]]
            preamble_ids = [int(i) for i in data["preamble_line_ids"]]
            tree = cls(
                doc_id=str(data["doc_id"]),
                roots=[_node_from_dict(s, lines) for s in data["sections"]],
                preamble=[lines[i] for i in preamble_ids],
                preamble_line_ids=preamble_ids,
            )
        except (KeyError, TypeError, IndexError, ValueError) as e:
            raise SchemaError(f"Malformed structure JSON: {e!r}") from e
        return tree


def _node_to_dict(node: SectionNode) -> dict[str, Any]:
    data: dict[str, Any] = {
        "header": node.title,
        "header_line_id": node.header_line_id,
        "level": node.level,
        "page": node.page,
        "body_line_ids": list(node.body_line_ids),
        "body_text": [line.text for line in node.body],
        "children": [_node_to_dict(child) for child in node.children],
    }
    if node.ontology_class is not None:
        data["ontology_class"] = node.ontology_class
    if node.concepts is not None:
        data["concepts"] = list(node.concepts)
    if node.summary is not None:
        data["summary"] = node.summary
    return data


def _node_from_dict(data: dict[str, Any], lines: list[LineRecord]) -> SectionNode:
    header_id = int(data["header_line_id"])
    body_ids = [int(i) for i in data["body_line_ids"]]
    return SectionNode(
        header=lines[header_id],
        header_line_id=header_id,
        level=int(data["level"]),
        body=[lines[i] for i in body_ids],
        body_line_ids=body_ids,
        children=[_node_from_dict(child, lines) for child in data["children"]],
        ontology_class=data.get("ontology_class"),
        concepts=data.get("concepts"),
        summary=data.get("summary"),
    )


__all__ = ["SectionNode", "TocTree"]
