"""Exception types shared across the toolkit."""

from __future__ import annotations


class WattbenchError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(WattbenchError, TypeError):
    """Arithmetic or conversion between incompatible physical dimensions."""


class QuantityError(WattbenchError, ValueError):
    """A quantity was constructed with an out-of-domain value."""


class TraceError(WattbenchError, ValueError):
    """A power trace or bundle violates its schema or invariants."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CatalogError(WattbenchError, ValueError):
    """A catalog file violates its schema (duplicate key, bad field, ...)."""


class SchemaError(WattbenchError, ValueError):
    """A data file does not match its documented schema."""


class MeasureError(WattbenchError, ValueError):
    """Run records are inconsistent with the requested aggregation."""
