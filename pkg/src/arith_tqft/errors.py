"""Exception types shared across the package, each with a stable machine-readable code."""

from __future__ import annotations


class EngineError(Exception):
    """Base error; `code` is a stable kebab-case identifier for scripting."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class ValidationError(EngineError):
    """Bad inputs or violated preconditions (CLI exit code 1)."""


class ComputationError(EngineError):
    """Resource limits or numeric failures during computation (CLI exit code 2)."""
