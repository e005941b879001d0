"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and an optional
``witness`` (a JSON-serializable value) so the CLI can emit a structured
error document without string parsing.
"""

from __future__ import annotations

from typing import Any


class SievecalcError(Exception):
    code = "error"

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def to_document(self) -> dict:
        doc = {"code": self.code, "message": self.message}
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc


class CategoryParseError(SievecalcError):
    code = "parse_error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message, {"line": line, "column": column} if line is not None else None)
        self.line = line
        self.column = column


class CategoryValidationError(SievecalcError):
    code = "validation_error"


class UnknownObject(SievecalcError):
    code = "unknown_object"


class UnknownArrow(SievecalcError):
    code = "unknown_arrow"


class UnknownFixture(SievecalcError):
    code = "unknown_fixture"


class ObjectMismatch(SievecalcError):
    code = "object_mismatch"


class CategoryMismatch(SievecalcError):
    code = "category_mismatch"


class NotASieve(SievecalcError):
    code = "not_a_sieve"


class NotPullbackStable(SievecalcError):
    code = "not_pullback_stable"


class NotATopology(SievecalcError):
    code = "not_a_topology"


class GuardExceeded(SievecalcError):
    code = "guard_exceeded"


class PreconditionError(SievecalcError):
    code = "precondition"


class NotAJIdeal(PreconditionError):
    code = "not_a_j_ideal"


class RelativizationError(PreconditionError):
    code = "no_relativization"


class MalformedDerivation(SievecalcError):
    code = "malformed_derivation"


class ConsistencyError(SievecalcError):
    """Two independent routes to the same quantity disagreed.

    Never expected; raised instead of silently picking one answer.
    """

    code = "internal_inconsistency"
