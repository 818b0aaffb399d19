"""Shared error types."""


class ResourceCeilingError(Exception):
    """An enumeration exceeded its configured ceiling."""


class DialectError(ValueError):
    """The ontology is outside the dialect a procedure supports."""


class ScopeError(ValueError):
    """The inputs are outside the scope of an exact procedure."""
