"""In-memory triple store with three hash indexes."""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Iterable, Iterator

from .terms import BNode, Iri, Literal

Triple = tuple  # (subject, predicate, object)

_fresh_bnode_ids = itertools.count(1)


def fresh_bnode() -> BNode:
    return BNode(f"genid{next(_fresh_bnode_ids)}")


class RdfGraph:
    """A set of triples plus the prefix table it was parsed with.

    The graph is mutable while loading; :meth:`freeze` turns further
    mutation into an error so a finished graph can be shared between
    readers.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: dict[str, str] | None = None) -> None:
        self._spo: dict = defaultdict(lambda: defaultdict(set))
        self._pos: dict = defaultdict(lambda: defaultdict(set))
        self._osp: dict = defaultdict(lambda: defaultdict(set))
        self._size = 0
        self._frozen = False
        self.prefixes: dict[str, str] = dict(prefixes or {})
        for t in triples:
            self.add(*t)

    # mutation

    def add(self, s, p, o) -> bool:
        if self._frozen:
            raise RuntimeError("graph is frozen")
        if isinstance(s, Literal):
            raise ValueError(f"literal {s} cannot be a subject")
        if not isinstance(p, Iri):
            raise ValueError(f"predicate must be an IRI, got {p}")
        objs = self._spo[s][p]
        if o in objs:
            return False
        objs.add(o)
        self._pos[p][o].add(s)
        self._osp[o][s].add(p)
        self._size += 1
        return True

    def add_all(self, triples: Iterable[Triple]) -> int:
        return sum(self.add(*t) for t in triples)

    def freeze(self) -> "RdfGraph":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    # queries

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[Triple]:
        for s, pmap in self._spo.items():
            for p, objs in pmap.items():
                for o in objs:
                    yield (s, p, o)

    def __contains__(self, triple) -> bool:
        s, p, o = triple
        return o in self._spo.get(s, {}).get(p, ())

    def __eq__(self, other) -> bool:
        if not isinstance(other, RdfGraph):
            return NotImplemented
        return len(self) == len(other) and all(t in other for t in self)

    __hash__ = None

    def __repr__(self) -> str:
        return f"RdfGraph({self._size} triples)"

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        """Triples matching a pattern; ``None`` is a wildcard."""
        if s is not None:
            pmap = self._spo.get(s)
            if not pmap:
                return
            preds = [p] if p is not None else list(pmap)
            for pred in preds:
                objs = pmap.get(pred, ())
                if o is not None:
                    if o in objs:
                        yield (s, pred, o)
                else:
                    for obj in list(objs):
                        yield (s, pred, obj)
        elif p is not None:
            omap = self._pos.get(p)
            if not omap:
                return
            objs = [o] if o is not None else list(omap)
            for obj in objs:
                for subj in list(omap.get(obj, ())):
                    yield (subj, p, obj)
        elif o is not None:
            for subj, preds in list(self._osp.get(o, {}).items()):
                for pred in list(preds):
                    yield (subj, pred, o)
        else:
            yield from list(self)

    def count(self, s=None, p=None, o=None) -> int:
        """Number of matches, computed from the indexes where possible."""
        if s is not None and p is not None and o is None:
            return len(self._spo.get(s, {}).get(p, ()))
        if p is not None and o is not None and s is None:
            return len(self._pos.get(p, {}).get(o, ()))
        if s is None and p is None and o is None:
            return self._size
        return sum(1 for _ in self.triples(s, p, o))

    def objects(self, s, p) -> set:
        return set(self._spo.get(s, {}).get(p, ()))

    def subjects(self, p, o) -> set:
        return set(self._pos.get(p, {}).get(o, ()))

    def terms(self) -> set:
        out = set()
        for s, p, o in self:
            out.update((s, p, o))
        return out

    def copy(self) -> "RdfGraph":
        return RdfGraph(self, self.prefixes)

    def blank_nodes(self) -> set:
        return {t for t in self.terms() if isinstance(t, BNode)}


def merge_graphs(graphs: Iterable[RdfGraph]) -> RdfGraph:
    """Union of several graphs.

    Blank nodes are scoped to their source graph: a label already used by an
    earlier graph is renamed instead of being merged.
    """
    out = RdfGraph()
    used: set = set()
    for g in graphs:
        own = g.blank_nodes()
        rename = {}
        for b in own:
            if b in used:
                rename[b] = fresh_bnode()
                while rename[b] in used or rename[b] in own:
                    rename[b] = fresh_bnode()
        for s, p, o in g:
            out.add(rename.get(s, s), p, rename.get(o, o))
        used |= own | set(rename.values())
        for k, v in g.prefixes.items():
            out.prefixes.setdefault(k, v)
    return out
