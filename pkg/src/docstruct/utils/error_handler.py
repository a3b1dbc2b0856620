"""
Error types and CLI error handling for docstruct.
"""

import json
import logging
import sys
from collections.abc import Callable
from functools import wraps
from typing import Any

logger = logging.getLogger(__name__)


class DocStructError(Exception):
    """Base error carrying the process exit code and a stable error code."""

    default_error_code = "DOCSTRUCT_ERROR"

    def __init__(
        self, message: str, exit_code: int = 1, error_code: str | None = None
    ):
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code or self.default_error_code
        super().__init__(self.message)

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": self.message,
            "error_code": self.error_code,
            "exit_code": self.exit_code,
        }


class ParseError(DocStructError):
    """Malformed XML or CSV input."""

    default_error_code = "PARSE_ERROR"

    def __init__(
        self,
        message: str,
        line: int | None = None,
        offset: int | None = None,
    ):
        self.line = line
        self.offset = offset
        if line is not None:
            message = f"{message} (line {line}, offset {offset or 0})"
        super().__init__(message)


class SchemaError(DocStructError):
    """Input is well-formed but misses or mistypes a required attribute."""

    default_error_code = "SCHEMA_ERROR"


class ContractError(DocStructError):
    """An operation was called with arguments violating its preconditions."""

    default_error_code = "CONTRACT_ERROR"


class ModelFormatError(DocStructError):
    """A serialized model is corrupt, truncated or of an unsupported version."""

    default_error_code = "MODEL_FORMAT_ERROR"


class UsageError(DocStructError):
    """Missing model or input; reported with exit code 2."""

    default_error_code = "USAGE_ERROR"

    def __init__(self, message: str):
        super().__init__(message, exit_code=2)


def handle_cli_errors(f: Callable[..., int]) -> Callable[..., int]:
    """Decorator turning docstruct errors into exit codes and JSON diagnostics."""

    @wraps(f)
    def decorated_function(*args: Any, **kwargs: Any) -> int:
        try:
            return f(*args, **kwargs)
        except DocStructError as e:
            logger.warning("Command %s failed: %s", f.__name__, e.message)
            print(json.dumps(e.to_dict(), sort_keys=True), file=sys.stderr)
            return e.exit_code
        except Exception as e:
            logger.error("Unexpected error in %s: %s", f.__name__, e, exc_info=True)
            payload = {
                "error": "Internal error",
                "error_code": "INTERNAL_ERROR",
                "exit_code": 1,
            }
            print(json.dumps(payload, sort_keys=True), file=sys.stderr)
            return 1

    return decorated_function


__all__ = [
    "DocStructError",
    "ParseError",
    "SchemaError",
    "ContractError",
    "ModelFormatError",
    "UsageError",
    "handle_cli_errors",
]
