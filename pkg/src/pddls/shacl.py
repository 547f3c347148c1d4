"""SHACL node shapes that test an ordered pair of individuals.

The pair ``(a, b)`` is presented to a shape as a virtual focus node ``f``
with ``f pddl:param1 a``, ``f pddl:param2 b`` and ``f rdf:type`` set to the
shape's target class. Property constraints then follow sequence paths from
``f`` and compare the value sets they reach. Only ``sh:lessThanOrEquals``
and ``sh:equals`` are supported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ShapeError
from .rdf.graph import RdfGraph
from .rdf.terms import RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE, SH, BNode, Iri, Literal, term_sort_key
from .sparql import FilterError, compare

PDDL_NS = "uri:pddl#"
PARAM1 = Iri(PDDL_NS + "param1")
PARAM2 = Iri(PDDL_NS + "param2")

SH_NODE_SHAPE = Iri(SH + "NodeShape")
SH_TARGET_CLASS = Iri(SH + "targetClass")
SH_PROPERTY = Iri(SH + "property")
SH_PATH = Iri(SH + "path")
SH_LESS_THAN_OR_EQUALS = Iri(SH + "lessThanOrEquals")
SH_EQUALS = Iri(SH + "equals")

COMPARATORS = {SH_LESS_THAN_OR_EQUALS: "lessThanOrEquals", SH_EQUALS: "equals"}
_ANNOTATIONS = {Iri(SH + n) for n in ("name", "description", "message", "order", "group")}


@dataclass(frozen=True)
class PropertyConstraint:
    path: tuple[Iri, ...]
    comparator: str
    other_path: tuple[Iri, ...]


@dataclass(frozen=True)
class Shape:
    shape_iri: object
    target_class: Iri
    properties: tuple[PropertyConstraint, ...]


def _sh_name(iri: Iri) -> str:
    return "sh:" + iri.value[len(SH) :] if iri.value.startswith(SH) else str(iri)


def _decode_list(g: RdfGraph, head) -> list:
    items = []
    node = head
    seen = set()
    while node != RDF_NIL:
        if node in seen:
            raise ShapeError("cyclic RDF list in sh:path")
        seen.add(node)
        firsts = g.objects(node, RDF_FIRST)
        rests = g.objects(node, RDF_REST)
        if len(firsts) != 1 or len(rests) != 1:
            raise ShapeError("malformed RDF list in sh:path")
        items.append(next(iter(firsts)))
        node = next(iter(rests))
    return items


def _decode_path(g: RdfGraph, node) -> tuple[Iri, ...]:
    if isinstance(node, Iri) and node != RDF_NIL:
        return (node,)
    if isinstance(node, BNode) and g.objects(node, RDF_FIRST):
        steps = _decode_list(g, node)
        if not steps:
            raise ShapeError("empty sh:path")
        for step in steps:
            if not isinstance(step, Iri):
                raise ShapeError("only sequence paths of IRIs are supported")
        return tuple(steps)
    raise ShapeError(f"unsupported sh:path form {node}")


def _single(g: RdfGraph, node, pred: Iri, what: str):
    values = g.objects(node, pred)
    if not values:
        raise ShapeError(f"{what} is missing {_sh_name(pred)}")
    if len(values) > 1:
        raise ShapeError(f"{what} has more than one {_sh_name(pred)}")
    return next(iter(values))


def _other_path(g: RdfGraph, node) -> tuple[Iri, ...]:
    # Plain SHACL names a property IRI; the nested form wraps a property shape.
    if isinstance(node, Iri):
        return (node,)
    inner = _single(g, node, SH_PROPERTY, "comparison target")
    return _decode_path(g, _single(g, inner, SH_PATH, "nested property shape"))


def _load_property(g: RdfGraph, node) -> list[PropertyConstraint]:
    for _, pred, _ in g.triples(s=node):
        if pred.value.startswith(SH) and pred not in COMPARATORS and pred != SH_PATH and pred not in _ANNOTATIONS:
            raise ShapeError(f"unsupported constraint component {_sh_name(pred)}")
    path = _decode_path(g, _single(g, node, SH_PATH, "property shape"))
    out = []
    for pred, name in COMPARATORS.items():
        for target in sorted(g.objects(node, pred), key=term_sort_key):
            out.append(PropertyConstraint(path, name, _other_path(g, target)))
    if not out:
        raise ShapeError(f"property shape on path {path} has no supported constraint")
    return out


def load_shapes(g: RdfGraph) -> list[Shape]:
    """One :class:`Shape` per ``sh:NodeShape`` in ``g``, sorted by IRI."""
    shapes = []
    for node in sorted(g.subjects(RDF_TYPE, SH_NODE_SHAPE), key=term_sort_key):
        shapes.append(load_shape(g, node))
    return shapes


def load_shape(g: RdfGraph, node) -> Shape:
    for _, pred, _ in g.triples(s=node):
        if pred.value.startswith(SH) and pred not in (SH_TARGET_CLASS, SH_PROPERTY) and pred not in _ANNOTATIONS:
            raise ShapeError(f"unsupported constraint component {_sh_name(pred)}")
    target = _single(g, node, SH_TARGET_CLASS, f"shape {node}")
    if not isinstance(target, Iri):
        raise ShapeError(f"shape {node}: sh:targetClass must be an IRI")
    props: list[PropertyConstraint] = []
    for prop in sorted(g.objects(node, SH_PROPERTY), key=term_sort_key):
        props.extend(_load_property(g, prop))
    return Shape(node, target, tuple(props))


class _Focus:
    """The virtual focus node; never equal to any graph term."""

    __slots__ = ()


def _values(g: RdfGraph, focus_edges: dict, path: tuple[Iri, ...], focus: _Focus) -> set:
    current: set = {focus}
    for pred in path:
        nxt: set = set()
        for node in current:
            if node is focus:
                nxt |= focus_edges.get(pred, set())
            elif not isinstance(node, Literal):
                nxt |= g.objects(node, pred)
        current = nxt
    return current


def conforms_pair(shape: Shape, g: RdfGraph, a, b) -> bool:
    """True when the pair ``(a, b)`` satisfies every constraint of ``shape``."""
    focus = _Focus()
    edges = {PARAM1: {a}, PARAM2: {b}, RDF_TYPE: {shape.target_class}}
    for c in shape.properties:
        left = _values(g, edges, c.path, focus)
        right = _values(g, edges, c.other_path, focus)
        if c.comparator == "equals":
            if not left or left != right:
                return False
        else:
            try:
                if not all(compare(v, "<=", w) for v in left for w in right):
                    return False
            except FilterError:
                return False
    return True


def typed_individuals(g: RdfGraph) -> list:
    return sorted({s for s, _, _ in g.triples(p=RDF_TYPE)}, key=term_sort_key)


def candidate_pairs(g: RdfGraph) -> list[tuple]:
    """Every ordered pair of nodes that carry at least one ``rdf:type``."""
    nodes = typed_individuals(g)
    return list(itertools.product(nodes, nodes))


def derive_pairs_shacl(shape: Shape, g: RdfGraph, candidates) -> set[tuple]:
    return {(a, b) for a, b in candidates if conforms_pair(shape, g, a, b)}
