import json
from dataclasses import replace

import pytest
from hypothesis import given, settings

from pddls.context import ContextMap, check_context, expand, remote_context_path, resolve_remote
from pddls.errors import ContextError, SchemaError
from pddls.jsonld import dumps, from_jsonld, to_jsonld
from pddls.syntax import parse_document
from strategies import documents


def test_expand_bound_terms(domain_verbatim):
    ctx = domain_verbatim.context
    assert expand("available", ctx) == "uri:cril/action/available"
    assert expand("pick-n-insert", ctx) == "uri:cril/action/pick-n-insert"
    assert expand("unknown-symbol", ctx) is None


def test_expand_folds_case_but_keeps_iri_case():
    ctx = ContextMap((("Grip", "uri:X/Grip"),))
    assert expand("GRIP", ctx) == "uri:X/Grip"


def test_check_context_flags_shared_iri_and_duplicates():
    ctx = ContextMap((("a", "uri:1"), ("b", "uri:1"), ("A", "uri:2")))
    codes = [(d.level, d.code) for d in check_context(ctx)]
    assert codes == [("WARNING", "duplicate-iri"), ("ERROR", "duplicate-term")]


def test_remote_context_files(tmp_path):
    (tmp_path / "robots.jsonld").write_text(json.dumps({"@context": {"grip": "uri:r/grip", "pddl": "uri:pddl"}}))
    ctx = ContextMap((("grip", "uri:local/grip"),), ("uri:ctx/robots",))
    assert remote_context_path(tmp_path, "uri:ctx/robots") == tmp_path / "robots.jsonld"
    resolved = resolve_remote(ctx, tmp_path)
    assert resolved.remote == ()
    assert resolved.get("grip") == "uri:local/grip"  # the document's own binding wins
    with pytest.raises(ContextError):
        resolve_remote(ContextMap((), ("uri:ctx/missing",)), tmp_path)
    with pytest.raises(ContextError):
        resolve_remote(ctx, None)


# --- JSON-LD ---------------------------------------------------------------


def test_example_domain_fields(domain_verbatim):
    data = to_jsonld(domain_verbatim)
    assert list(data) == ["@context", "pddl:domain", "pddl:requirements", "pddl:predicates", "pddl:structure"]
    assert data["@context"] == {
        "pddl": "uri:pddl",
        "available": "uri:cril/action/available",
        "insertable": "uri:cril/action/insertable",
        "pick-n-insert": "uri:cril/action/pick-n-insert",
    }
    text = dumps(data)
    assert '"pddl:domain": "example-ur5-domain"' in text
    assert '"pddl:requirements": [":strips", ":adl", ":typing"]' in text
    assert '"pddl": "uri:pddl"' in text
    assert data["pddl:predicates"] == [
        {"available": [{"?object": None}]},
        {"insertable": [{"?piller": None}, {"?hole": None}]},
    ]
    assert data["pddl:structure"][0]["pddl:action"] == "pick-n-insert"


def test_empty_domain_json():
    data = to_jsonld(parse_document("(define (domain d0))"))
    assert data["@context"] == {"pddl": "uri:pddl"}
    assert data["pddl:predicates"] == []


def test_problem_context(problem_verbatim):
    data = to_jsonld(problem_verbatim)
    ctx = data["@context"]
    assert len(ctx) == 5 and ctx["pddl"] == "uri:pddl"
    assert ctx["CylindricalHole_4"] == "uri:cril/demo2/CylindricalHole_4"
    assert data["pddl:goal"] == {"not": {"available": ["CylindricalHole_4"]}}


def _without_semantics(doc):
    return replace(doc, requirements=tuple(r for r in doc.requirements if r != ":semantics"))


def test_round_trip_of_example(domain_verbatim, problem_verbatim):
    assert from_jsonld(json.loads(dumps(to_jsonld(domain_verbatim)))) == domain_verbatim
    # the example problem has a context but never declares :semantics
    back = from_jsonld(json.loads(dumps(to_jsonld(problem_verbatim))))
    assert back.requirements == (":semantics",)
    assert _without_semantics(back) == problem_verbatim


def test_missing_context_is_rejected():
    with pytest.raises(SchemaError, match="@context"):
        from_jsonld({"pddl:domain": "d"})


def test_unknown_key_is_named():
    with pytest.raises(SchemaError, match="pddl:bogus"):
        from_jsonld({"@context": {"pddl": "uri:pddl"}, "pddl:domain": "d", "pddl:bogus": 1})


def test_rebinding_pddl_is_rejected():
    with pytest.raises(SchemaError):
        from_jsonld({"@context": {"pddl": "uri:other"}, "pddl:domain": "d"})


def test_dump_is_deterministic_and_indented(domain):
    a, b = dumps(to_jsonld(domain)), dumps(to_jsonld(domain))
    assert a == b
    assert a.startswith('{\n  "@context": {\n    "pddl": "uri:pddl",\n')
    assert a.endswith("}\n")


@settings(max_examples=150, deadline=None)
@given(documents)
def test_generated_documents_round_trip_through_json(doc):
    assert from_jsonld(json.loads(dumps(to_jsonld(doc)))) == doc


@settings(max_examples=50, deadline=None)
@given(documents)
def test_every_bound_term_is_in_the_context_object(doc):
    ctx = to_jsonld(doc)["@context"]
    for term, iri in doc.context.entries:
        assert ctx[term] == iri
