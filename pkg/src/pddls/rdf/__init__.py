"""RDF terms, an in-memory triple store, Turtle I/O and RDFS closure."""

from .closure import rdfs_closure
from .graph import RdfGraph, merge_graphs
from .terms import BNode, Iri, Literal, Term, numeric_value, term_sort_key
from .turtle import parse_turtle, serialize_turtle

__all__ = [
    "BNode",
    "Iri",
    "Literal",
    "RdfGraph",
    "Term",
    "merge_graphs",
    "numeric_value",
    "parse_turtle",
    "rdfs_closure",
    "serialize_turtle",
    "term_sort_key",
]
