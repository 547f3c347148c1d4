"""Translation between PDDLS documents and their JSON-LD form.

The ``:context`` bindings become the JSON-LD ``@context`` object, which
always carries the reserved ``"pddl": "uri:pddl"`` binding. PDDL sections are
stored under ``pddl:*`` keys. Predicates and parameters are lists of
single-key objects (``{"?x": null}`` for untyped, ``{"?x": "type"}`` for
typed). Formulas are nested single-key objects such as
``{"and": [{"available": ["?x"]}, {"not": {...}}]}``.
"""

from __future__ import annotations

import json

from .context import PDDL_PREFIX, PDDL_PREFIX_IRI, ContextMap, fold
from .errors import SchemaError
from .syntax import (
    SEMANTICS_REQUIREMENT,
    ActionDef,
    And,
    Atom,
    Formula,
    Not,
    PddlsDocument,
    PredicateDecl,
    TypedName,
)

DOMAIN_KEYS = (
    "@context",
    "pddl:domain",
    "pddl:requirements",
    "pddl:types",
    "pddl:constants",
    "pddl:predicates",
    "pddl:extras",
    "pddl:structure",
)
PROBLEM_KEYS = (
    "@context",
    "pddl:problem",
    "pddl:domainRef",
    "pddl:requirements",
    "pddl:objects",
    "pddl:init",
    "pddl:goal",
    "pddl:extras",
)
ACTION_KEYS = ("pddl:action", "pddl:parameters", "pddl:precondition", "pddl:effect")


def _typed(items) -> list[dict]:
    return [{t.name: t.type} for t in items]


def formula_to_json(f: Formula):
    if isinstance(f, Atom):
        return {f.name: list(f.args)}
    if isinstance(f, Not):
        return {"not": formula_to_json(f.arg)}
    return {"and": [formula_to_json(a) for a in f.args]}


def _extras_to_json(plain):
    return plain if isinstance(plain, str) else [_extras_to_json(p) for p in plain]


def to_jsonld(doc: PddlsDocument) -> dict:
    """JSON-LD object for ``doc`` with a stable key order."""
    ctx_obj = {PDDL_PREFIX: PDDL_PREFIX_IRI}
    for term, iri in doc.context.entries:
        ctx_obj.setdefault(term, iri)
    context = [*doc.context.remote, ctx_obj] if doc.context.remote else ctx_obj
    reqs = [r for r in doc.requirements if fold(r) != SEMANTICS_REQUIREMENT]
    out: dict = {"@context": context}
    if doc.kind == "domain":
        out["pddl:domain"] = doc.name
        out["pddl:requirements"] = reqs
        if doc.types:
            out["pddl:types"] = _typed(doc.types)
        if doc.constants:
            out["pddl:constants"] = _typed(doc.constants)
        out["pddl:predicates"] = [{p.name: _typed(p.params)} for p in doc.predicates]
        if doc.extras:
            out["pddl:extras"] = _extras_to_json(doc.extras)
        structure = []
        for act in doc.actions:
            entry: dict = {"pddl:action": act.name, "pddl:parameters": _typed(act.parameters)}
            if act.precondition is not None:
                entry["pddl:precondition"] = formula_to_json(act.precondition)
            if act.effect is not None:
                entry["pddl:effect"] = formula_to_json(act.effect)
            structure.append(entry)
        out["pddl:structure"] = structure
    else:
        out["pddl:problem"] = doc.name
        if doc.domain_ref is not None:
            out["pddl:domainRef"] = doc.domain_ref
        out["pddl:requirements"] = reqs
        out["pddl:objects"] = _typed(doc.objects)
        out["pddl:init"] = [formula_to_json(f) for f in doc.init]
        out["pddl:goal"] = formula_to_json(doc.goal) if doc.goal is not None else None
        if doc.extras:
            out["pddl:extras"] = _extras_to_json(doc.extras)
    return out


# --- inverse ---------------------------------------------------------------


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def _single_key(obj, where: str) -> tuple[str, object]:
    _expect(isinstance(obj, dict) and len(obj) == 1, f"{where}: expected a single-key object, got {obj!r}")
    return next(iter(obj.items()))


def _typed_from(items, where: str) -> tuple[TypedName, ...]:
    _expect(isinstance(items, list), f"{where}: expected a list")
    out = []
    for item in items:
        name, typ = _single_key(item, where)
        _expect(typ is None or isinstance(typ, str), f"{where}: type of '{name}' must be a string or null")
        out.append(TypedName(name, typ))
    return tuple(out)


def formula_from_json(obj, where: str = "formula") -> Formula:
    key, value = _single_key(obj, where)
    if key == "and":
        _expect(isinstance(value, list), f"{where}: 'and' needs a list")
        return And(tuple(formula_from_json(v, where) for v in value))
    if key == "not":
        return Not(formula_from_json(value, where))
    _expect(
        isinstance(value, list) and all(isinstance(a, str) for a in value),
        f"{where}: arguments of '{key}' must be a list of strings",
    )
    return Atom(key, tuple(value))


def _extras_from(obj, where: str):
    if isinstance(obj, str):
        return obj
    _expect(isinstance(obj, list), f"{where}: expected nested lists of strings")
    return tuple(_extras_from(o, where) for o in obj)


def _context_from(value) -> ContextMap:
    parts = value if isinstance(value, list) else [value]
    remote: list[str] = []
    pairs: list[tuple[str, str]] = []
    for part in parts:
        if isinstance(part, str):
            remote.append(part)
            continue
        _expect(isinstance(part, dict), "@context entries must be objects or IRI strings")
        for term, iri in part.items():
            _expect(isinstance(iri, str) and iri != "", f"@context: term '{term}' must map to a non-empty IRI")
            if term == PDDL_PREFIX:
                _expect(iri == PDDL_PREFIX_IRI, f"@context: 'pddl' must be bound to {PDDL_PREFIX_IRI}")
                continue
            pairs.append((term, iri))
    return ContextMap(tuple(pairs), tuple(remote))


def from_jsonld(data: dict) -> PddlsDocument:
    """Rebuild a document from :func:`to_jsonld` output.

    ``:semantics`` is re-added to the requirements exactly when the context
    is non-empty.
    """
    _expect(isinstance(data, dict), "top level must be a JSON object")
    _expect("@context" in data, "missing @context")
    if "pddl:domain" in data:
        kind, allowed = "domain", DOMAIN_KEYS
    elif "pddl:problem" in data:
        kind, allowed = "problem", PROBLEM_KEYS
    else:
        raise SchemaError("missing pddl:domain or pddl:problem")
    for key in data:
        _expect(key in allowed, f"unknown key '{key}' in a {kind} document")
    name = data[f"pddl:{kind}"]
    _expect(isinstance(name, str) and name != "", f"pddl:{kind} must be a non-empty string")
    context = _context_from(data["@context"])
    reqs = data.get("pddl:requirements", [])
    _expect(isinstance(reqs, list) and all(isinstance(r, str) for r in reqs), "pddl:requirements must be strings")
    reqs = tuple(reqs) + ((SEMANTICS_REQUIREMENT,) if context else ())
    fields: dict = {"kind": kind, "name": name, "requirements": reqs, "context": context}
    if "pddl:extras" in data:
        fields["extras"] = _extras_from(data["pddl:extras"], "pddl:extras")
    if kind == "domain":
        fields["types"] = _typed_from(data.get("pddl:types", []), "pddl:types")
        fields["constants"] = _typed_from(data.get("pddl:constants", []), "pddl:constants")
        preds = []
        _expect(isinstance(data.get("pddl:predicates", []), list), "pddl:predicates must be a list")
        for item in data.get("pddl:predicates", []):
            pname, params = _single_key(item, "pddl:predicates")
            preds.append(PredicateDecl(pname, _typed_from(params, f"predicate '{pname}'")))
        fields["predicates"] = tuple(preds)
        actions = []
        _expect(isinstance(data.get("pddl:structure", []), list), "pddl:structure must be a list")
        for entry in data.get("pddl:structure", []):
            _expect(isinstance(entry, dict), "pddl:structure entries must be objects")
            for key in entry:
                _expect(key in ACTION_KEYS, f"unknown key '{key}' in pddl:structure")
            _expect(isinstance(entry.get("pddl:action"), str), "pddl:structure entry needs pddl:action")
            pre = entry.get("pddl:precondition")
            eff = entry.get("pddl:effect")
            actions.append(
                ActionDef(
                    entry["pddl:action"],
                    _typed_from(entry.get("pddl:parameters", []), "pddl:parameters"),
                    formula_from_json(pre, "pddl:precondition") if pre is not None else None,
                    formula_from_json(eff, "pddl:effect") if eff is not None else None,
                )
            )
        fields["actions"] = tuple(actions)
    else:
        if "pddl:domainRef" in data:
            _expect(isinstance(data["pddl:domainRef"], str), "pddl:domainRef must be a string")
            fields["domain_ref"] = data["pddl:domainRef"]
        fields["objects"] = _typed_from(data.get("pddl:objects", []), "pddl:objects")
        _expect(isinstance(data.get("pddl:init", []), list), "pddl:init must be a list")
        fields["init"] = tuple(formula_from_json(f, "pddl:init") for f in data.get("pddl:init", []))
        goal = data.get("pddl:goal")
        fields["goal"] = formula_from_json(goal, "pddl:goal") if goal is not None else None
    return PddlsDocument(**fields)


# --- text ------------------------------------------------------------------

_INLINE_WIDTH = 78


def _dump(value, indent: int, expand: bool) -> str:
    compact = json.dumps(value, ensure_ascii=False)
    if not expand and (not isinstance(value, (dict, list)) or indent + len(compact) <= _INLINE_WIDTH):
        return compact
    if isinstance(value, dict):
        if not value:
            return "{}"
        pad = " " * (indent + 2)
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_dump(v, indent + 2, False)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        pad = " " * (indent + 2)
        items = [pad + _dump(v, indent + 2, False) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"
    return compact


def dumps(data: dict) -> str:
    """UTF-8 JSON text: 2-space indent, short lists and objects kept on one line.

    The top-level object and the ``@context`` object are always expanded.
    """
    pad = "  "
    items = []
    for key, value in data.items():
        expand = key == "@context" and isinstance(value, dict)
        items.append(f"{pad}{json.dumps(key, ensure_ascii=False)}: {_dump(value, 2, expand)}")
    return "{\n" + ",\n".join(items) + "\n}\n"
