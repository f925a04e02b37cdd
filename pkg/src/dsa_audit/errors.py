"""Exception hierarchy. Each error carries a stable ``code`` for diagnostics."""

from __future__ import annotations


class AuditError(Exception):
    code = "AUDIT_ERROR"
    # file the error came from; filled in by whoever opened it
    source: str | None = None

    def __init__(self, message: str, *, field: str | None = None) -> None:
        super().__init__(message)
        self.field = field

    def describe(self) -> str:
        prefix = f"{self.source}: " if self.source else ""
        return f"{prefix}{self}"


class VocabularyError(AuditError):
    code = "VOCABULARY_ERROR"


class AmbiguityError(AuditError):
    code = "AMBIGUITY_ERROR"


class SchemaError(AuditError):
    code = "SCHEMA_ERROR"


class InvalidValueError(AuditError):
    code = "VALUE_ERROR"


class DuplicateError(AuditError):
    code = "DUPLICATE_ERROR"


class RowError(AuditError):
    """A malformed row in a delimited dump; ``row`` is 1-based and counts the header."""

    code = "ROW_ERROR"

    def __init__(self, message: str, *, row: int) -> None:
        super().__init__(f"row {row}: {message}")
        self.row = row


class InputError(AuditError):
    code = "INPUT_ERROR"


class PeriodError(AuditError):
    code = "PERIOD_ERROR"


class KeyMismatchError(AuditError):
    code = "KEY_ERROR"
