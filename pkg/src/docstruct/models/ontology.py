"""
Ontology class sets: the semantic section labels and their header aliases.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any

from marshmallow import ValidationError

from ..utils.error_handler import SchemaError, UsageError
from ..utils.text_utils import DATA_DIR, normalize_header
from ..utils.validation_schemas import OntologySchema

logger = logging.getLogger(__name__)

UNKNOWN_SECTION = "UnknownSection"
BUNDLED_ONTOLOGIES = ("arxiv", "rfp")


@dataclass(frozen=True)
class OntologyClassSet:
    name: str
    classes: tuple[str, ...]
    aliases: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def index(self, class_name: str) -> int:
        return self.classes.index(class_name)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "classes": list(self.classes), "aliases": dict(self.aliases)}


def ontology_from_dict(data: dict[str, Any]) -> OntologyClassSet:
    try:
        loaded = OntologySchema().load(data)
    except ValidationError as e:
        raise SchemaError(f"Invalid ontology config: {e.messages}") from e

    aliases: dict[str, str] = {}
    for alias, target in loaded["aliases"].items():
        key = normalize_header(alias)
        previous = aliases.get(key)
        if previous is not None and previous != target:
            raise SchemaError(f"Alias {alias!r} maps to both {previous} and {target}")
        aliases[key] = target
    return OntologyClassSet(
        name=loaded["name"],
        classes=tuple(loaded["classes"]),
        aliases=MappingProxyType(dict(sorted(aliases.items()))),
    )


def load_ontology(name_or_path: str | Path = "arxiv") -> OntologyClassSet:
    """Load a bundled ontology by name (``arxiv``, ``rfp``) or a JSON file."""
    if str(name_or_path) in BUNDLED_ONTOLOGIES:
        path = DATA_DIR / f"ontology_{name_or_path}.json"
    else:
        path = Path(name_or_path)
    if not path.exists():
        raise UsageError(f"Ontology config not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"Ontology config {path} is not valid JSON: {e}") from e
    ontology = ontology_from_dict(data)
    logger.debug(
        "Loaded ontology %s: %d classes, %d aliases",
        ontology.name,
        len(ontology.classes),
        len(ontology.aliases),
    )
    return ontology


__all__ = [
    "UNKNOWN_SECTION",
    "BUNDLED_ONTOLOGIES",
    "OntologyClassSet",
    "ontology_from_dict",
    "load_ontology",
]
