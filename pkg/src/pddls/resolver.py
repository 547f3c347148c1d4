"""From PDDLS plus ontologies to plain PDDL.

A role IRI ``R`` with ``R pddls:establishedWith body`` is a conditional
predicate: its assertions ``R(a, b)`` are the pairs selected by ``body``,
either a SPARQL query literal tagged ``@sparql`` or a SHACL node shape.

:func:`resolve` runs one fixed, non-recursive pipeline: RDFS closure, a
single pass of every establish rule over that closed graph, closure again,
symbol canonicalization, and injection of derived facts into the problem's
initial state.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Union

from .canonicalize import DomainTranslation, apply_translation, canonicalize_contexts
from .context import fold
from .diagnostics import ERROR, INFO, WARNING, Diagnostic, has_errors
from .errors import ParseError, PddlsError, ResolveError, RuleError, ShapeError, UnsupportedFeatureError
from .rdf.closure import rdfs_closure
from .rdf.graph import RdfGraph
from .rdf.terms import Iri, Literal, term_sort_key
from .shacl import Shape, candidate_pairs, derive_pairs_shacl, load_shape
from .sparql import Query, evaluate, parse_query
from .syntax import Atom, PddlsDocument, print_pddl, strip_semantics, validate_document

PDDLS_NS = "uri:pddls#"
ESTABLISHED_WITH = Iri(PDDLS_NS + "establishedWith")
SPARQL_LANG = "sparql"


@dataclass(frozen=True)
class SparqlBody:
    query: Query
    source: str = field(default="", compare=False)


@dataclass(frozen=True)
class ShaclBody:
    shape: Shape


@dataclass(frozen=True)
class EstablishRule:
    role_iri: Iri
    body: Union[SparqlBody, ShaclBody]


@dataclass(frozen=True)
class DerivedFact:
    role_iri: Iri
    subject: object
    object: object

    @property
    def sort_key(self) -> tuple:
        return (term_sort_key(self.role_iri), term_sort_key(self.subject), term_sort_key(self.object))


@dataclass
class ResolvedBundle:
    domain: PddlsDocument
    problem: PddlsDocument
    derived: list[DerivedFact]
    translations: list[DomainTranslation]
    injected: list[Atom] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    graph: RdfGraph | None = None


# --- rules -----------------------------------------------------------------


def collect_rules(g: RdfGraph) -> list[EstablishRule]:
    """One rule per ``pddls:establishedWith`` triple, sorted by role then body."""
    rules: list[EstablishRule] = []
    triples = sorted(g.triples(p=ESTABLISHED_WITH), key=lambda t: (term_sort_key(t[0]), term_sort_key(t[2])))
    for role, _, body in triples:
        if not isinstance(role, Iri):
            raise RuleError(f"establishedWith subject {role} is not an IRI")
        if isinstance(body, Literal):
            if body.lang != SPARQL_LANG:
                raise RuleError(f"rule for {role}: literal bodies must be tagged @sparql")
            try:
                query = parse_query(body.lexical)
            except (ParseError, UnsupportedFeatureError) as exc:
                raise RuleError(f"rule for {role}: bad SPARQL body: {exc}") from exc
            if len(query.projected_vars) != 2:
                raise RuleError(
                    f"rule for {role}: SPARQL body must project exactly 2 variables, got {len(query.projected_vars)}"
                )
            rules.append(EstablishRule(role, SparqlBody(query, body.lexical)))
        else:
            try:
                shape = load_shape(g, body)
            except ShapeError as exc:
                raise RuleError(f"rule for {role}: {body} is not a loadable shape: {exc}") from exc
            rules.append(EstablishRule(role, ShaclBody(shape)))
    return rules


def establish(rule: EstablishRule, g: RdfGraph, candidates=None) -> set[DerivedFact]:
    """Role assertions selected by one rule body over ``g``.

    SHACL bodies test ``candidates`` (default: every ordered pair of typed
    nodes in ``g``).
    """
    if isinstance(rule.body, SparqlBody):
        pairs = evaluate(rule.body.query, g).as_set()
    else:
        pairs = derive_pairs_shacl(rule.body.shape, g, candidate_pairs(g) if candidates is None else candidates)
    return {DerivedFact(rule.role_iri, a, b) for a, b in pairs}


def establish_all(rules: list[EstablishRule], g: RdfGraph, workers: int = 1) -> list[DerivedFact]:
    """Apply every rule once to the same graph.

    A role with several bodies is asserted only for pairs that every body
    selects; the bodies are read as alternative encodings of one condition.
    Rules never observe each other's output, so they may run in parallel.
    """
    if workers > 1 and len(rules) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: establish(r, g), rules))
    else:
        results = [establish(r, g) for r in rules]
    by_role: dict[Iri, set] = {}
    for rule, facts in zip(rules, results):
        pairs = {(f.subject, f.object) for f in facts}
        by_role[rule.role_iri] = pairs if rule.role_iri not in by_role else by_role[rule.role_iri] & pairs
    derived = [DerivedFact(role, a, b) for role, pairs in by_role.items() for a, b in pairs]
    return sorted(derived, key=lambda f: f.sort_key)


def interpret(ontology: RdfGraph, closure: bool = True) -> tuple[RdfGraph, list[DerivedFact]]:
    """Closure, one establish pass, closure again; returns the final graph and facts."""
    closed = rdfs_closure(ontology) if closure else ontology.copy()
    closed.freeze()
    rules = collect_rules(closed)
    derived = establish_all(rules, closed)
    enriched = closed.copy()
    for fact in derived:
        if not isinstance(fact.subject, Literal):
            enriched.add(fact.subject, fact.role_iri, fact.object)
    final = rdfs_closure(enriched) if closure else enriched
    return final.freeze(), derived


# --- documents -------------------------------------------------------------


def _merge_domains(name: str, domains: list[PddlsDocument], diags: list[Diagnostic]) -> PddlsDocument:
    """Combine canonicalized domains into one; first occurrence of a name wins."""
    first = domains[0]
    if len(domains) == 1:
        return replace(first, name=name)
    reqs: list[str] = []
    ctx_entries: list = []
    types, consts, preds, actions, extras = [], [], [], [], []
    seen = {k: set() for k in ("req", "ctx", "type", "const", "pred", "act")}

    def add(bucket, key, items, keyfn):
        for item in items:
            k = fold(keyfn(item))
            if k not in seen[key]:
                seen[key].add(k)
                bucket.append(item)
            elif key == "pred":
                prior = next(p for p in bucket if fold(p.name) == k)
                if prior.arity != item.arity:
                    diags.append(
                        Diagnostic(ERROR, "arity-conflict", f"predicate '{item.name}' declared with arities {prior.arity} and {item.arity}")
                    )
            elif key == "act":
                diags.append(Diagnostic(WARNING, "duplicate-action", f"action '{item.name}' defined by more than one domain; keeping the first"))

    for d in domains:
        add(reqs, "req", d.requirements, lambda r: r)
        add(ctx_entries, "ctx", d.context.entries, lambda e: e[0])
        add(types, "type", d.types, lambda t: t.name)
        add(consts, "const", d.constants, lambda t: t.name)
        add(preds, "pred", d.predicates, lambda p: p.name)
        add(actions, "act", d.actions, lambda a: a.name)
        extras.extend(e for e in d.extras if e not in extras)
    from .context import ContextMap

    return PddlsDocument(
        kind="domain",
        name=name,
        requirements=tuple(reqs),
        context=ContextMap(tuple(ctx_entries)),
        types=tuple(types),
        constants=tuple(consts),
        predicates=tuple(preds),
        actions=tuple(actions),
        extras=tuple(extras),
    )


def _object_symbol(iri: str, problem: PddlsDocument, domain: PddlsDocument, uri_to_sym: dict) -> str | None:
    declared = {fold(o.name): o.name for o in problem.objects}
    declared.update({fold(c.name): c.name for c in domain.constants})
    candidates = problem.context.terms_for(iri) + domain.context.terms_for(iri)
    if iri in uri_to_sym:
        candidates.append(uri_to_sym[iri])
    for term in candidates:
        if fold(term) in declared:
            return declared[fold(term)]
    return None


def _term_iri(term) -> str | None:
    return term.value if isinstance(term, Iri) else None


def resolve(
    problem: PddlsDocument,
    domains: list[PddlsDocument],
    ontology: RdfGraph,
    closure: bool = True,
) -> ResolvedBundle:
    """Resolve a PDDLS problem against its domains and an ontology graph.

    Derived facts are injected as ``(R a b)`` init atoms when the role IRI
    has a symbol in some context and both endpoints are bound to declared
    objects. Every other derived fact is reported in the diagnostics.
    """
    if problem.kind != "problem":
        raise ResolveError("the problem argument is not a PDDLS problem")
    if not domains:
        raise ResolveError("no domains supplied")
    for d in domains:
        if d.kind != "domain":
            raise ResolveError(f"'{d.name}' is not a domain")
    if problem.domain_ref is not None and not any(fold(d.name) == fold(problem.domain_ref) for d in domains):
        names = ", ".join(d.name for d in domains)
        raise ResolveError(f"problem refers to domain '{problem.domain_ref}', supplied: {names}")
    diags: list[Diagnostic] = []

    graph, derived = interpret(ontology, closure)

    state, translations = canonicalize_contexts(problem.context, [(d.name, d.context) for d in domains])
    translated = [apply_translation(d, tr) for d, tr in zip(domains, translations)]
    primary = problem.domain_ref or domains[0].name
    ordered = sorted(translated, key=lambda d: fold(d.name) != fold(primary))
    domain = _merge_domains(primary, ordered, diags)

    existing = {(fold(a.name),) + tuple(fold(x) for x in a.args) for a in problem.init if isinstance(a, Atom)}
    injected: list[Atom] = []
    for fact in derived:
        role = fact.role_iri.value
        label = f"{fact.role_iri} {fact.subject} {fact.object}"
        pred_sym = state.uri_to_sym.get(role)
        if pred_sym is None:
            terms = domain.context.terms_for(role)
            pred_sym = terms[0] if terms else None
        if pred_sym is None:
            diags.append(Diagnostic(INFO, "unbound-role", f"dropped {label}: role has no context binding"))
            continue
        decl = domain.predicate(pred_sym)
        if decl is None or decl.arity != 2:
            found = "undeclared" if decl is None else f"declared with arity {decl.arity}"
            diags.append(Diagnostic(WARNING, "role-arity", f"dropped {label}: predicate '{pred_sym}' is {found}, expected arity 2"))
            continue
        ends = []
        for end in (fact.subject, fact.object):
            iri = _term_iri(end)
            sym = _object_symbol(iri, problem, domain, state.uri_to_sym) if iri else None
            ends.append(sym)
        if None in ends:
            missing = [str(e) for e, s in zip((fact.subject, fact.object), ends) if s is None]
            diags.append(Diagnostic(INFO, "unbound-object", f"dropped {label}: no problem object for {', '.join(missing)}"))
            continue
        atom = Atom(decl.name, tuple(ends))
        key = (fold(atom.name),) + tuple(fold(x) for x in atom.args)
        if key in existing:
            continue
        existing.add(key)
        injected.append(atom)

    resolved_problem = replace(problem, init=tuple(problem.init) + tuple(injected))
    return ResolvedBundle(domain, resolved_problem, derived, translations, injected, diags, graph)


def emit(bundle: ResolvedBundle, out_dir) -> tuple[Path, Path]:
    """Write ``domain.pddl`` and ``problem.pddl`` as plain PDDL.

    The written text is reparsed and validated before returning.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    domain_path = out / "domain.pddl"
    problem_path = out / "problem.pddl"
    domain_text = print_pddl(bundle.domain, strip_semantics=True)
    problem_text = print_pddl(bundle.problem, strip_semantics=True)
    check_emitted(domain_text, problem_text)
    domain_path.write_text(domain_text, encoding="utf-8")
    problem_path.write_text(problem_text, encoding="utf-8")
    return domain_path, problem_path


def check_emitted(domain_text: str, problem_text: str) -> list[Diagnostic]:
    """Reparse emitted files and validate them; used as a self-check."""
    from .syntax import parse_document

    domain = parse_document(domain_text)
    problem = parse_document(problem_text)
    diags = validate_document(domain) + validate_document(problem, domain)
    if has_errors(diags):
        raise PddlsError("emitted PDDL does not validate:\n" + "\n".join(map(str, diags)))
    return diags


__all__ = [
    "DerivedFact",
    "EstablishRule",
    "ResolvedBundle",
    "ShaclBody",
    "SparqlBody",
    "collect_rules",
    "emit",
    "establish",
    "establish_all",
    "interpret",
    "resolve",
    "strip_semantics",
]
