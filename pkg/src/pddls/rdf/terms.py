"""RDF terms and the vocabulary IRIs used across the package."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Union

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SH = "http://www.w3.org/ns/shacl#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
RDF_LANGSTRING = RDF + "langString"

NUMERIC_DATATYPES = frozenset(
    {
        XSD_INTEGER,
        XSD_DECIMAL,
        XSD_DOUBLE,
        XSD + "float",
        XSD + "int",
        XSD + "long",
        XSD + "short",
        XSD + "nonNegativeInteger",
        XSD + "positiveInteger",
        XSD + "negativeInteger",
        XSD + "nonPositiveInteger",
    }
)


@dataclass(frozen=True)
class Iri:
    value: str

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    lang: str | None = None

    def __post_init__(self) -> None:
        if self.lang is not None:
            object.__setattr__(self, "lang", self.lang.lower())
            object.__setattr__(self, "datatype", RDF_LANGSTRING)

    def __str__(self) -> str:
        if self.lang:
            return f'"{self.lexical}"@{self.lang}'
        if self.datatype == XSD_STRING:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype}>'


@dataclass(frozen=True)
class BNode:
    id: str

    def __str__(self) -> str:
        return f"_:{self.id}"


Term = Union[Iri, Literal, BNode]

RDF_TYPE = Iri(RDF + "type")
RDF_FIRST = Iri(RDF + "first")
RDF_REST = Iri(RDF + "rest")
RDF_NIL = Iri(RDF + "nil")
RDFS_SUBCLASSOF = Iri(RDFS + "subClassOf")


def numeric_value(term) -> Decimal | None:
    """Exact value of a numeric literal, or None for anything else.

    Integers are promoted to decimals; no binary floating point is involved.
    """
    if not isinstance(term, Literal) or term.datatype not in NUMERIC_DATATYPES:
        return None
    try:
        value = Decimal(term.lexical.strip())
    except InvalidOperation:
        return None
    return None if value.is_nan() else value


_KIND_RANK = {Iri: 0, BNode: 1, Literal: 2}


def term_sort_key(term) -> tuple:
    """Deterministic ordering by kind then lexical form."""
    if isinstance(term, Literal):
        return (2, term.lexical, term.datatype, term.lang or "")
    if isinstance(term, Iri):
        return (0, term.value, "", "")
    return (_KIND_RANK.get(type(term), 3), str(getattr(term, "id", term)), "", "")


def local_name(term) -> str:
    """Last ``/`` or ``#`` segment of an IRI; used for display only."""
    value = term.value if isinstance(term, Iri) else str(term)
    for sep in ("#", "/"):
        if sep in value:
            value = value.rsplit(sep, 1)[-1] or value
    return value
