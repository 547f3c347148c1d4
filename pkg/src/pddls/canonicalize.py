"""Alias canonicalization across a problem and independently written domains.

Symbols bound to the same IRI end up with one shared name; symbols that
collide by name but denote different IRIs are given fresh names. The problem
context is authoritative and never renamed; domains are processed in the
order given, so the output depends on that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .context import ContextMap, fold
from .errors import ContextError
from .syntax import ActionDef, Atom, PddlsDocument, PredicateDecl, TypedName, map_formula


@dataclass
class TranslationState:
    """Global symbol table. ``sym_to_uri`` is keyed by case-folded symbol."""

    sym_to_uri: dict[str, str] = field(default_factory=dict)
    uri_to_sym: dict[str, str] = field(default_factory=dict)

    def bind(self, symbol: str, iri: str) -> None:
        self.sym_to_uri[fold(symbol)] = iri
        self.uri_to_sym.setdefault(iri, symbol)


@dataclass(frozen=True)
class DomainTranslation:
    domain_id: str
    map: dict = field(hash=False)

    def get(self, symbol: str) -> str:
        for k, v in self.map.items():
            if fold(k) == fold(symbol):
                return v
        return symbol

    def is_identity(self) -> bool:
        return all(fold(k) == fold(v) for k, v in self.map.items())

    def lines(self) -> list[str]:
        return [f"{k} -> {v}" for k, v in self.map.items()]


def _check_unique(ctx: ContextMap, owner: str) -> None:
    seen: set[str] = set()
    for term, _ in ctx.entries:
        if fold(term) in seen:
            raise ContextError(f"{owner}: term '{term}' is bound more than once")
        seen.add(fold(term))


def _fresh(term: str, state: TranslationState, reserved: set[str]) -> str:
    k = 2
    while True:
        candidate = f"{term}_{k}"
        if fold(candidate) not in state.sym_to_uri and fold(candidate) not in reserved:
            return candidate
        k += 1


def canonicalize_contexts(
    problem_ctx: ContextMap, domain_ctxs: list[tuple[str, ContextMap]]
) -> tuple[TranslationState, list[DomainTranslation]]:
    """Build per-domain symbol maps and the final global symbol table.

    For each domain term ``t`` bound to IRI ``u``:

    * ``t`` already globally bound to ``u``: keep ``t``;
    * ``u`` already has a canonical symbol ``t'``: rename ``t`` to ``t'``;
    * ``t`` unused globally: ``t`` becomes the canonical symbol for ``u``;
    * otherwise mint ``t_k`` (smallest ``k >= 2`` unused anywhere) for ``u``.
    """
    _check_unique(problem_ctx, "problem context")
    reserved = {fold(t) for t, _ in problem_ctx.entries}
    for domain_id, ctx in domain_ctxs:
        _check_unique(ctx, f"domain '{domain_id}' context")
        reserved |= {fold(t) for t, _ in ctx.entries}

    state = TranslationState()
    for t, u in problem_ctx.entries:
        state.bind(t, u)

    out: list[DomainTranslation] = []
    for domain_id, ctx in domain_ctxs:
        mapping: dict[str, str] = {}
        for t, u in ctx.entries:
            if state.sym_to_uri.get(fold(t)) == u:
                mapping[t] = t
            elif u in state.uri_to_sym:
                mapping[t] = state.uri_to_sym[u]
            elif fold(t) not in state.sym_to_uri:
                state.bind(t, u)
                mapping[t] = t
            else:
                fresh = _fresh(t, state, reserved)
                state.bind(fresh, u)
                mapping[t] = fresh
        out.append(DomainTranslation(domain_id, mapping))
    return state, out


def build_translation_maps(
    problem_ctx: ContextMap, domain_ctxs: list[tuple[str, ContextMap]]
) -> list[DomainTranslation]:
    return canonicalize_contexts(problem_ctx, domain_ctxs)[1]


def apply_translation(doc: PddlsDocument, tr: DomainTranslation) -> PddlsDocument:
    """Rename every mapped symbol in a domain; variables are never touched."""
    if not tr.map:
        return doc

    def ren(symbol: str) -> str:
        return symbol if symbol.startswith("?") else tr.get(symbol)

    def ren_typed(items) -> tuple[TypedName, ...]:
        return tuple(TypedName(ren(t.name), ren(t.type) if t.type is not None else None) for t in items)

    def ren_atom(atom: Atom) -> Atom:
        return Atom(ren(atom.name), tuple(ren(a) for a in atom.args))

    seen: set[str] = set()
    entries = []
    for t, u in doc.context.entries:
        new = ren(t)
        if fold(new) not in seen:
            seen.add(fold(new))
            entries.append((new, u))
    return replace(
        doc,
        context=ContextMap(tuple(entries), doc.context.remote),
        types=ren_typed(doc.types),
        constants=ren_typed(doc.constants),
        predicates=tuple(PredicateDecl(ren(p.name), ren_typed(p.params)) for p in doc.predicates),
        actions=tuple(
            ActionDef(
                ren(a.name),
                ren_typed(a.parameters),
                map_formula(a.precondition, ren_atom),
                map_formula(a.effect, ren_atom),
            )
            for a in doc.actions
        ),
    )
