"""
Serialization helpers: canonical JSON and the versioned binary container
used for trained models.
"""

import json
import math
import struct
from pathlib import Path
from typing import IO, Any

import numpy as np

from .error_handler import DocStructError, ModelFormatError

REPORT_DECIMALS = 4

_HEADER = struct.Struct(">8sBQ")


def sanitize_floats(obj: Any, decimals: int | None = None) -> Any:
    """Recursively make a structure JSON-safe.

    ``NaN`` and infinities become ``None``; numpy scalars and arrays are turned
    into Python values; when ``decimals`` is given every float is rounded.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, str | int):
        return obj

    if isinstance(obj, np.generic):
        return sanitize_floats(obj.item(), decimals)

    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return None
        return round(obj, decimals) if decimals is not None else obj

    if isinstance(obj, np.ndarray):
        return sanitize_floats(obj.tolist(), decimals)

    if isinstance(obj, dict):
        return {str(k): sanitize_floats(v, decimals) for k, v in obj.items()}

    if isinstance(obj, list | tuple):
        return [sanitize_floats(v, decimals) for v in obj]

    return obj


def canonical_json(obj: Any, decimals: int | None = None, indent: int | None = 2) -> str:
    """Dump with sorted keys so equal structures give identical bytes."""
    return json.dumps(
        sanitize_floats(obj, decimals),
        sort_keys=True,
        indent=indent,
        ensure_ascii=False,
    )


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise DocStructError(f"Cannot write {path}: {e}") from e


def read_text(path: str | Path) -> str:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise DocStructError(f"Cannot read {path}: {e}") from e


def write_container(sink: IO[bytes], magic: bytes, version: int, body: dict[str, Any]) -> None:
    """Write ``magic | version | length | json body``."""
    payload = json.dumps(sanitize_floats(body), sort_keys=True).encode("utf-8")
    sink.write(_HEADER.pack(magic, version, len(payload)))
    sink.write(payload)


def read_container(source: IO[bytes], magic: bytes, supported_version: int) -> dict[str, Any]:
    """Read a container written by :func:`write_container`.

    Raises:
        ModelFormatError: on a foreign magic, a newer version, a truncated body
            or an unparsable JSON payload.
    """
    header = source.read(_HEADER.size)
    if len(header) < _HEADER.size:
        raise ModelFormatError("File too short for a model header")

    found_magic, version, length = _HEADER.unpack(header)
    if found_magic != magic:
        raise ModelFormatError(f"Unexpected magic bytes {found_magic!r}")
    if version > supported_version:
        raise ModelFormatError(
            f"Unsupported format version {version} (this build reads <= {supported_version})",
            error_code="VERSION_ERROR",
        )

    payload = source.read(length)
    if len(payload) != length:
        raise ModelFormatError(
            f"Truncated model body: expected {length} bytes, got {len(payload)}"
        )
    try:
        body = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ModelFormatError(f"Corrupt model body: {e}") from e
    if not isinstance(body, dict):
        raise ModelFormatError("Model body is not a JSON object")
    return body


__all__ = [
    "REPORT_DECIMALS",
    "sanitize_floats",
    "canonical_json",
    "write_text",
    "read_text",
    "write_container",
    "read_container",
]
