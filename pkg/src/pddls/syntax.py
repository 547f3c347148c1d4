"""PDDLS abstract syntax, parser, printer and static checks.

PDDLS is plain PDDL plus a ``(:context term - IRI ...)`` section that binds
local symbols to global IRIs. ``print_pddl(doc, strip_semantics=True)``
recovers the plain PDDL a stock planner accepts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Union

from .context import PDDL_PREFIX, ContextMap, check_context, fold
from .diagnostics import ERROR, WARNING, Diagnostic
from .errors import ParseError
from .sexpr import SAtom, SExpr, SList, plain_to_text, read_one, to_plain

SEMANTICS_REQUIREMENT = ":semantics"

# Sections kept verbatim but never interpreted.
OPAQUE_SECTIONS = frozenset({":functions", ":constraints", ":metric"})

_UNSUPPORTED_CONNECTIVES = frozenset(
    {"or", "imply", "forall", "exists", "when", "preference", "either"}
)
# temporal qualifiers; as plain predicate names (e.g. ``(at ?x ?loc)``) they are fine
_TEMPORAL = frozenset({"at", "over"})


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class TypedName:
    name: str
    type: str | None = None


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...] = ()


Formula = Union[Atom, Not, And]


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[TypedName, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionDef:
    name: str
    parameters: tuple[TypedName, ...] = ()
    precondition: Formula | None = None
    effect: Formula | None = None


@dataclass(frozen=True)
class PddlsDocument:
    """A parsed domain (``kind == "domain"``) or problem (``kind == "problem"``)."""

    kind: str
    name: str
    requirements: tuple[str, ...] = ()
    context: ContextMap = field(default_factory=ContextMap)
    types: tuple[TypedName, ...] = ()
    constants: tuple[TypedName, ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    actions: tuple[ActionDef, ...] = ()
    objects: tuple[TypedName, ...] = ()
    init: tuple[Formula, ...] = ()
    goal: Formula | None = None
    domain_ref: str | None = None
    extras: tuple = ()

    @property
    def is_domain(self) -> bool:
        return self.kind == "domain"

    def predicate(self, name: str) -> PredicateDecl | None:
        for p in self.predicates:
            if fold(p.name) == fold(name):
                return p
        return None


def atoms_in(formula: Formula | None) -> Iterator[Atom]:
    if formula is None:
        return
    if isinstance(formula, Atom):
        yield formula
    elif isinstance(formula, Not):
        yield from atoms_in(formula.arg)
    else:
        for sub in formula.args:
            yield from atoms_in(sub)


def map_formula(formula: Formula | None, fn) -> Formula | None:
    """Rebuild ``formula`` with every atom replaced by ``fn(atom)``."""
    if formula is None:
        return None
    if isinstance(formula, Atom):
        return fn(formula)
    if isinstance(formula, Not):
        return Not(map_formula(formula.arg, fn))
    return And(tuple(map_formula(a, fn) for a in formula.args))


def literals(formula: Formula | None) -> list[tuple[bool, Atom]]:
    """Flatten a conjunction into ``(positive, atom)`` pairs.

    Double negation is removed; negated conjunctions are rejected because
    they would need disjunction.
    """
    out: list[tuple[bool, Atom]] = []

    def walk(f: Formula, positive: bool) -> None:
        if isinstance(f, Atom):
            out.append((positive, f))
        elif isinstance(f, Not):
            walk(f.arg, not positive)
        elif positive:
            for sub in f.args:
                walk(sub, True)
        else:
            from .errors import UnsupportedFeatureError

            raise UnsupportedFeatureError("negated conjunction (needs disjunction)")

    if formula is not None:
        walk(formula, True)
    return out


def normalize(formula: Formula | None) -> Formula | None:
    """Flat ``And`` of literals in which ``Not`` wraps only atoms."""
    if formula is None:
        return None
    return And(tuple(a if pos else Not(a) for pos, a in literals(formula)))


# --- parsing ---------------------------------------------------------------


def _err(message: str, node: SExpr) -> ParseError:
    return ParseError(message, node.line or None, node.column or None)


def _atom(node: SExpr, what: str) -> str:
    if not isinstance(node, SAtom):
        raise _err(f"expected {what}, found a list", node)
    return node.value


def _list(node: SExpr, what: str) -> SList:
    if not isinstance(node, SList):
        raise _err(f"expected {what}, found '{node.value}'", node)
    return node


def _parse_typed_list(items: Iterable[SExpr], where: str) -> tuple[TypedName, ...]:
    out: list[TypedName] = []
    pending: list[str] = []
    items = list(items)
    i = 0
    while i < len(items):
        node = items[i]
        if isinstance(node, SAtom) and node.value == "-":
            if not pending:
                raise _err(f"'-' without names in {where}", node)
            if i + 1 >= len(items):
                raise _err(f"missing type after '-' in {where}", node)
            tnode = items[i + 1]
            if isinstance(tnode, SList):
                raise _err(f"compound types are not supported in {where}", tnode)
            out.extend(TypedName(n, tnode.value) for n in pending)
            pending = []
            i += 2
            continue
        pending.append(_atom(node, f"a name in {where}"))
        i += 1
    out.extend(TypedName(n) for n in pending)
    return tuple(out)


def _parse_formula(node: SExpr) -> Formula:
    lst = _list(node, "a formula")
    if not lst.items:
        return And(())
    head = lst.items[0]
    if isinstance(head, SList):
        raise _err("formula head must be a symbol", head)
    key = head.value.casefold()
    if key == "and":
        return And(tuple(_parse_formula(a) for a in lst.items[1:]))
    if key == "not":
        if len(lst.items) != 2:
            raise _err("'not' takes exactly one argument", lst)
        return Not(_parse_formula(lst.items[1]))
    if key in _UNSUPPORTED_CONNECTIVES or (key in _TEMPORAL and any(isinstance(a, SList) for a in lst.items[1:])):
        raise _err(f"unsupported connective '{head.value}'", head)
    args = []
    for arg in lst.items[1:]:
        if isinstance(arg, SList):
            raise _err(f"function terms are not supported in '{head.value}'", arg)
        args.append(arg.value)
    return Atom(head.value, tuple(args))


def _parse_init_literal(node: SExpr) -> Formula:
    f = _parse_formula(node)
    if isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.arg, Atom)):
        return f
    raise _err("initial state entries must be atoms or negated atoms", node)


def _parse_context(section: SList) -> ContextMap:
    items = list(section.items[1:])
    if len(items) == 1 and isinstance(items[0], SAtom):
        return ContextMap((), (items[0].value,))
    pairs: list[tuple[str, str]] = []
    i = 0
    while i < len(items):
        term = items[i]
        _atom(term, "a context term")
        if i + 1 >= len(items):
            raise _err(f"malformed term mapping for '{term.value}': missing '-' and IRI", term)
        dash = items[i + 1]
        if not (isinstance(dash, SAtom) and dash.value == "-"):
            raise _err(f"malformed term mapping for '{term.value}': expected '-'", dash)
        if i + 2 >= len(items):
            raise _err(f"malformed term mapping for '{term.value}': missing IRI", dash)
        iri = items[i + 2]
        if not isinstance(iri, SAtom) or not iri.value or iri.value == "-":
            raise _err(f"malformed term mapping for '{term.value}': expected an IRI", iri)
        if fold(term.value) == PDDL_PREFIX:
            raise _err("the 'pddl' prefix is reserved and cannot be rebound", term)
        pairs.append((term.value, iri.value))
        i += 3
    return ContextMap(tuple(pairs))


def _parse_action(section: SList) -> ActionDef:
    if len(section.items) < 2:
        raise _err("action without a name", section)
    name = _atom(section.items[1], "an action name")
    params: tuple[TypedName, ...] = ()
    pre = eff = None
    seen: set[str] = set()
    rest = list(section.items[2:])
    if len(rest) % 2:
        raise _err(f"action '{name}': keyword without a value", rest[-1])
    for key_node, value in zip(rest[0::2], rest[1::2]):
        key = _atom(key_node, "an action keyword").casefold()
        if key in seen:
            raise _err(f"action '{name}': duplicate {key}", key_node)
        seen.add(key)
        if key == ":parameters":
            params = _parse_typed_list(_list(value, "a parameter list").items, f"action '{name}' parameters")
            names = set()
            for p in params:
                if not p.name.startswith("?"):
                    raise _err(f"action '{name}': parameter '{p.name}' must start with '?'", value)
                if fold(p.name) in names:
                    raise _err(f"action '{name}': duplicate parameter '{p.name}'", value)
                names.add(fold(p.name))
        elif key == ":precondition":
            pre = _parse_formula(value)
        elif key == ":effect":
            eff = _parse_formula(value)
        else:
            raise _err(f"action '{name}': unsupported keyword '{key_node.value}'", key_node)
    return ActionDef(name, params, pre, eff)


def _parse_predicates(section: SList) -> tuple[PredicateDecl, ...]:
    out = []
    for item in section.items[1:]:
        lst = _list(item, "a predicate declaration")
        if not lst.items:
            raise _err("empty predicate declaration", lst)
        name = _atom(lst.items[0], "a predicate name")
        params = _parse_typed_list(lst.items[1:], f"predicate '{name}'")
        out.append(PredicateDecl(name, params))
    return tuple(out)


_DOMAIN_SECTIONS = {":requirements", ":context", ":types", ":constants", ":predicates", ":action"}
_PROBLEM_SECTIONS = {":domain", ":requirements", ":context", ":objects", ":init", ":goal"}


def parse_document(text: str) -> PddlsDocument:
    """Parse one PDDLS domain or problem."""
    root = read_one(text)
    root = _list(root, "(define ...)")
    if len(root.items) < 2 or not isinstance(root.items[0], SAtom) or root.items[0].value.casefold() != "define":
        raise _err("document must start with (define ...)", root)
    header = _list(root.items[1], "(domain NAME) or (problem NAME)")
    if len(header.items) != 2:
        raise _err("header must be (domain NAME) or (problem NAME)", header)
    kind = _atom(header.items[0], "'domain' or 'problem'").casefold()
    if kind not in ("domain", "problem"):
        raise _err(f"unknown document kind '{header.items[0].value}'", header.items[0])
    fields: dict = {"kind": kind, "name": _atom(header.items[1], "a document name")}
    allowed = _DOMAIN_SECTIONS if kind == "domain" else _PROBLEM_SECTIONS
    seen: set[str] = set()
    actions: list[ActionDef] = []
    extras: list = []
    for section in root.items[2:]:
        section = _list(section, "a section")
        if not section.items:
            raise _err("empty section", section)
        key = _atom(section.items[0], "a section keyword").casefold()
        if key != ":action":
            if key in seen:
                raise _err(f"duplicate section '{key}'", section)
            seen.add(key)
        if key in OPAQUE_SECTIONS:
            extras.append(to_plain(section))
            continue
        if key not in allowed:
            raise _err(f"section '{section.items[0].value}' is not allowed in a {kind}", section)
        body = section.items[1:]
        if key == ":requirements":
            fields["requirements"] = tuple(_atom(r, "a requirement key") for r in body)
        elif key == ":context":
            fields["context"] = _parse_context(section)
        elif key == ":types":
            fields["types"] = _parse_typed_list(body, ":types")
        elif key == ":constants":
            fields["constants"] = _parse_typed_list(body, ":constants")
        elif key == ":predicates":
            fields["predicates"] = _parse_predicates(section)
        elif key == ":action":
            act = _parse_action(section)
            if any(fold(a.name) == fold(act.name) for a in actions):
                raise _err(f"duplicate action '{act.name}'", section)
            actions.append(act)
        elif key == ":domain":
            if len(body) != 1:
                raise _err("(:domain NAME) takes exactly one name", section)
            fields["domain_ref"] = _atom(body[0], "a domain name")
        elif key == ":objects":
            fields["objects"] = _parse_typed_list(body, ":objects")
        elif key == ":init":
            fields["init"] = tuple(_parse_init_literal(a) for a in body)
        elif key == ":goal":
            if len(body) != 1:
                raise _err("(:goal F) takes exactly one formula", section)
            fields["goal"] = _parse_formula(body[0])
    if kind == "domain":
        fields["actions"] = tuple(actions)
    fields["extras"] = tuple(extras)
    return PddlsDocument(**fields)


# --- printing --------------------------------------------------------------


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return "(" + " ".join((f.name,) + f.args) + ")"
    if isinstance(f, Not):
        return f"(not {format_formula(f.arg)})"
    return "(and" + "".join(" " + format_formula(a) for a in f.args) + ")"


def format_typed_list(items: Iterable[TypedName]) -> str:
    items = list(items)
    parts: list[str] = []
    i = 0
    while i < len(items):
        j = i
        while j < len(items) and items[j].type == items[i].type:
            j += 1
        parts.extend(t.name for t in items[i:j])
        if items[i].type is not None:
            parts += ["-", items[i].type]
        i = j
    return " ".join(parts)


def _section(keyword: str, lines: list[str], inline: bool = False) -> str:
    if inline or not lines:
        return f"  ({keyword}" + "".join(" " + s for s in lines) + ")"
    return f"  ({keyword}\n" + "\n".join("    " + s for s in lines) + ")"


def print_pddl(doc: PddlsDocument, strip_semantics: bool = True) -> str:
    """Render ``doc`` as text.

    With ``strip_semantics`` the ``:context`` section and the ``:semantics``
    requirement are dropped, leaving plain PDDL.
    """
    out = [f"(define ({doc.kind} {doc.name})"]
    if doc.kind == "problem" and doc.domain_ref is not None:
        out.append(f"  (:domain {doc.domain_ref})")
    reqs = [r for r in doc.requirements if not (strip_semantics and fold(r) == SEMANTICS_REQUIREMENT)]
    if reqs:
        out.append(_section(":requirements", reqs, inline=True))
    if doc.context and not strip_semantics:
        if doc.context.remote and not doc.context.entries:
            out.append(_section(":context", list(doc.context.remote), inline=True))
        else:
            out.append(_section(":context", [f"{t} - {u}" for t, u in doc.context.entries]))
    if doc.types:
        out.append(_section(":types", [format_typed_list(doc.types)], inline=True))
    if doc.constants:
        out.append(_section(":constants", [format_typed_list(doc.constants)], inline=True))
    if doc.predicates:
        decls = [
            "(" + " ".join([p.name] + ([format_typed_list(p.params)] if p.params else [])) + ")"
            for p in doc.predicates
        ]
        out.append(_section(":predicates", decls))
    for extra in doc.extras:
        out.append("  " + plain_to_text(extra))
    for act in doc.actions:
        lines = [f"  (:action {act.name}", f"    :parameters ({format_typed_list(act.parameters)})"]
        if act.precondition is not None:
            lines.append(f"    :precondition {format_formula(act.precondition)}")
        if act.effect is not None:
            lines.append(f"    :effect {format_formula(act.effect)}")
        out.append("\n".join(lines) + ")")
    if doc.kind == "problem":
        if doc.objects:
            out.append(_section(":objects", [format_typed_list(doc.objects)], inline=True))
        if doc.init:
            out.append(_section(":init", [format_formula(a) for a in doc.init]))
        if doc.goal is not None:
            out.append(f"  (:goal {format_formula(doc.goal)})")
    return "\n".join(out) + ")\n"


def strip_semantics(doc: PddlsDocument) -> PddlsDocument:
    """The AST that ``print_pddl(doc, strip_semantics=True)`` reparses to."""
    reqs = tuple(r for r in doc.requirements if fold(r) != SEMANTICS_REQUIREMENT)
    return replace(doc, requirements=reqs, context=ContextMap())


# --- static checks ---------------------------------------------------------


def _free_variables(formula: Formula | None) -> list[str]:
    out: list[str] = []
    for atom in atoms_in(formula):
        out.extend(a for a in atom.args if a.startswith("?"))
    return out


def _check_atom_arity(atom: Atom, domain: PddlsDocument, where: str, diags: list[Diagnostic]) -> None:
    if atom.name == "=":
        return
    decl = domain.predicate(atom.name)
    if decl is None:
        diags.append(Diagnostic(WARNING, "undeclared-predicate", f"{where}: predicate '{atom.name}' is not declared"))
    elif decl.arity != len(atom.args):
        diags.append(
            Diagnostic(
                ERROR,
                "arity-mismatch",
                f"{where}: '{atom.name}' expects {decl.arity} argument(s), got {len(atom.args)}",
            )
        )


def validate_document(doc: PddlsDocument, domain: PddlsDocument | None = None) -> list[Diagnostic]:
    """Static diagnostics for a document.

    For a problem, pass its ``domain`` to also check predicate arities and
    domain constants.
    """
    diags = check_context(doc.context)
    if doc.kind == "domain":
        for act in doc.actions:
            declared = {fold(p.name) for p in act.parameters}
            reported: set[str] = set()
            for var in _free_variables(act.precondition) + _free_variables(act.effect):
                if fold(var) not in declared and fold(var) not in reported:
                    reported.add(fold(var))
                    diags.append(
                        Diagnostic(
                            WARNING,
                            "undeclared-variable",
                            f"action '{act.name}': variable '{var}' is not a parameter",
                        )
                    )
            for part in (act.precondition, act.effect):
                for atom in atoms_in(part):
                    _check_atom_arity(atom, doc, f"action '{act.name}'", diags)
        return diags

    known = {fold(o.name) for o in doc.objects}
    if domain is not None:
        known |= {fold(c.name) for c in domain.constants}
    reported = set()
    sections = [("init", f) for f in doc.init] + ([("goal", doc.goal)] if doc.goal is not None else [])
    for where, formula in sections:
        for atom in atoms_in(formula):
            if domain is not None:
                _check_atom_arity(atom, domain, where, diags)
            for arg in atom.args:
                if arg.startswith("?"):
                    diags.append(Diagnostic(ERROR, "variable-in-problem", f"{where}: variable '{arg}' in a problem"))
                elif fold(arg) not in known and fold(arg) not in reported:
                    reported.add(fold(arg))
                    diags.append(Diagnostic(WARNING, "undeclared-object", f"{where}: object '{arg}' is not declared"))
    return diags
