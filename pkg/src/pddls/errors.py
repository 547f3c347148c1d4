"""Exception hierarchy shared by every pddls module."""

from __future__ import annotations


class PddlsError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PddlsError):
    """Malformed input text, reported with a 1-based line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            super().__init__(f"line {line}, column {column}: {message}")
        else:
            super().__init__(message)


class UnknownPrefixError(ParseError):
    """A prefixed name uses a prefix that was never declared."""


class UnsupportedFeatureError(PddlsError):
    """Input is well-formed but uses a construct outside the supported subset."""


class SchemaError(PddlsError):
    """A JSON-LD document does not follow the expected PDDL-JSON-LD layout."""


class ContextError(PddlsError):
    """A term/IRI context is inconsistent (duplicate terms, unresolved remote context)."""


class ShapeError(PddlsError):
    """A SHACL shape graph cannot be loaded into the supported shape model."""


class RuleError(PddlsError):
    """An establishedWith rule body is malformed or has the wrong projection."""


class ResolveError(PddlsError):
    """Problem and domains cannot be combined (e.g. unknown domain name)."""


class GroundingError(PddlsError):
    """An action schema cannot be instantiated (e.g. unbound variable)."""


class RepoError(PddlsError):
    """Base class for skill repository failures."""


class DuplicateIriError(RepoError):
    """An IRI is already indexed by a different repository entry."""


class RepoIndexError(RepoError):
    """The repository index file is unreadable or corrupted."""
