from __future__ import annotations

from .graph import RdfGraph
from .terms import RDF_TYPE, RDFS_SUBCLASSOF, Literal


def superclasses(g: RdfGraph) -> dict:
    """Transitive ``rdfs:subClassOf`` successors of every class in ``g``."""
    direct: dict = {}
    for s, _, o in g.triples(p=RDFS_SUBCLASSOF):
        if not isinstance(o, Literal):
            direct.setdefault(s, set()).add(o)
    closed: dict = {}
    for start in direct:
        seen: set = set()
        stack = list(direct[start])
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            stack.extend(direct.get(c, ()))
        closed[start] = seen
    return closed


def rdfs_closure(g: RdfGraph) -> RdfGraph:
    """Materialize rdfs11 (subClassOf transitivity) and rdfs9 (type propagation).

    Returns a new graph; ``g`` is left untouched. Once subClassOf is
    transitively closed a single rdfs9 pass reaches the fixpoint, because
    rdfs9 never produces subClassOf triples.
    """
    out = g.copy()
    supers = superclasses(g)
    for c, ups in supers.items():
        for d in ups:
            out.add(c, RDFS_SUBCLASSOF, d)
    for x, _, c in list(g.triples(p=RDF_TYPE)):
        for d in supers.get(c, ()):
            out.add(x, RDF_TYPE, d)
    return out
