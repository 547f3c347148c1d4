import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ACTION, EX, FIXTURES, load_ttl
from pddls.errors import ResolveError, RuleError
from pddls.planner import solve
from pddls.rdf import Iri, Literal, RdfGraph, parse_turtle, rdfs_closure
from pddls.rdf.terms import XSD
from pddls.resolver import (
    DerivedFact,
    ShaclBody,
    SparqlBody,
    collect_rules,
    emit,
    establish,
    establish_all,
    interpret,
    resolve,
)
from pddls.syntax import Atom, parse_document

INSERTABLE = Iri(ACTION + "insertable")
INJECTED = Atom("insertable", ("CylindricalPillar_1", "CylindricalHole_4"))
EXPECTED_PAIRS = {
    (Iri(EX + "CylindricalPillar_1"), Iri(EX + "CylindricalHole_4")),
    (Iri(EX + "TriangularPillar_2"), Iri(EX + "TriangularHole_5")),
}
PREFIXES = "@prefix pddls: <uri:pddls#> . @prefix ex: <uri:t/> .\n"


def pairs(facts):
    return {(f.subject, f.object) for f in facts}


def sparql_only():
    return load_ttl("commonsense_hierarchy.ttl", "commonsense_sparql.ttl", "objects.ttl")


def shacl_only():
    return load_ttl("commonsense_hierarchy.ttl", "commonsense_shacl.ttl", "objects.ttl")


def pillar_hole_candidates(g):
    kind = lambda c: sorted(g.subjects(Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), Iri("uri:ex/shapes#" + c)), key=str)  # noqa: E731
    return {(p, h) for p in kind("Pillar") for h in kind("Hole")}


# --- rules -------------------------------------------------------------------


def test_sparql_rule_is_collected():
    (rule,) = collect_rules(sparql_only())
    assert rule.role_iri == INSERTABLE
    assert isinstance(rule.body, SparqlBody)


def test_shacl_rule_is_collected():
    (rule,) = collect_rules(shacl_only())
    assert isinstance(rule.body, ShaclBody)
    assert rule.body.shape.shape_iri == Iri("uri:ex/shapes#InsertableConstraint")


def test_both_rules_from_the_full_ontology(ontology):
    assert sorted(type(r.body).__name__ for r in collect_rules(ontology)) == ["ShaclBody", "SparqlBody"]


def test_no_rules():
    assert collect_rules(load_ttl("objects.ttl")) == []


@pytest.mark.parametrize(
    "body,fragment",
    [
        ('"SELECT ?a ?b ?c WHERE { ?a <uri:p> ?b . ?b <uri:p> ?c }"@sparql', "exactly 2"),
        ('"SELECT ?a ?b WHERE { ?a <uri:p> ?b }"@en', "@sparql"),
        ('"SELECT ?a ?b WHERE { ?a <uri:p> "@sparql', "bad SPARQL"),
        ('"SELECT ?a ?b WHERE { { ?a <uri:p> ?b } UNION { ?b <uri:p> ?a } }"@sparql', "bad SPARQL"),
        ("ex:NotAShape", "shape"),
    ],
)
def test_malformed_rules(body, fragment):
    g = parse_turtle(PREFIXES + f"ex:role pddls:establishedWith {body} .")
    with pytest.raises(RuleError, match=fragment):
        collect_rules(g)


# --- establish ---------------------------------------------------------------


def test_sparql_establish_gives_the_two_pairs():
    g = rdfs_closure(sparql_only())
    (rule,) = collect_rules(g)
    facts = establish(rule, g)
    assert pairs(facts) == EXPECTED_PAIRS
    assert {f.role_iri for f in facts} == {INSERTABLE}


def test_shacl_establish_with_pillar_hole_candidates():
    g = rdfs_closure(shacl_only())
    (rule,) = collect_rules(g)
    assert pairs(establish(rule, g, pillar_hole_candidates(g))) == EXPECTED_PAIRS


def test_both_bodies_together_agree_on_the_two_pairs(closed):
    assert pairs(establish_all(collect_rules(closed), closed)) == EXPECTED_PAIRS


def test_parallel_establish_matches_sequential(closed):
    rules = collect_rules(closed)
    assert establish_all(rules, closed, workers=4) == establish_all(rules, closed)


def test_establish_on_a_graph_without_objects():
    g = rdfs_closure(load_ttl("commonsense_hierarchy.ttl", "commonsense_sparql.ttl"))
    (rule,) = collect_rules(g)
    assert establish(rule, g) == set()


def test_single_pass_does_not_chain_rules():
    # link is derived from seed; hop reads link, but only from the graph as it
    # was before any rule fired
    g = parse_turtle(
        PREFIXES
        + """ex:link pddls:establishedWith "SELECT ?a ?b WHERE { ?a <uri:t/seed> ?b }"@sparql .
             ex:hop pddls:establishedWith "SELECT ?a ?b WHERE { ?a <uri:t/link> ?b }"@sparql .
             ex:x ex:seed ex:y ."""
    )
    graph, derived = interpret(g)
    assert [(f.role_iri.value, f.subject.value, f.object.value) for f in derived] == [("uri:t/link", "uri:t/x", "uri:t/y")]
    assert (Iri("uri:t/x"), Iri("uri:t/link"), Iri("uri:t/y")) in graph
    # a second pass over the enriched graph would find more: the pipeline must not run it
    assert len(establish_all(collect_rules(graph), graph)) == 2


def test_derived_triples_join_the_final_graph(closed):
    graph, derived = interpret(closed)
    for f in derived:
        assert (f.subject, f.role_iri, f.object) in graph
    assert rdfs_closure(graph) == graph


# --- resolve -----------------------------------------------------------------


def test_motivating_resolution(domain, problem, ontology):
    bundle = resolve(problem, [domain], ontology)
    assert bundle.injected == [INJECTED]
    assert bundle.problem.init == problem.init + (INJECTED,)
    assert pairs(bundle.derived) == EXPECTED_PAIRS
    dropped = [d for d in bundle.diagnostics if d.code == "unbound-object"]
    assert len(dropped) == 1
    assert "TriangularHole_5" in dropped[0].message
    assert solve(bundle.domain, bundle.problem) is not None


def test_empty_ontology_changes_nothing(domain, problem):
    bundle = resolve(problem, [domain], RdfGraph())
    assert bundle.problem == problem
    assert bundle.derived == [] and bundle.injected == []
    assert all(t.is_identity() for t in bundle.translations)
    assert bundle.domain == domain


def test_resolution_without_closure(domain, problem, ontology):
    # both bodies only follow edges asserted directly in the fixtures
    bundle = resolve(problem, [domain], ontology, closure=False)
    assert bundle.injected == [INJECTED]


def test_unknown_domain_reference(domain):
    p = parse_document("(define (problem q) (:domain elsewhere) (:goal (and)))")
    with pytest.raises(ResolveError, match="elsewhere"):
        resolve(p, [domain], RdfGraph())


def test_argument_kinds_are_checked(domain, problem):
    with pytest.raises(ResolveError):
        resolve(domain, [domain], RdfGraph())
    with pytest.raises(ResolveError):
        resolve(problem, [problem], RdfGraph())
    with pytest.raises(ResolveError):
        resolve(problem, [], RdfGraph())


def test_existing_atoms_are_not_duplicated(domain, problem, ontology):
    from dataclasses import replace

    p = replace(problem, init=problem.init + (Atom("INSERTABLE", ("cylindricalpillar_1", "CylindricalHole_4")),))
    bundle = resolve(p, [domain], ontology)
    assert bundle.injected == []
    assert bundle.problem.init == p.init


def test_role_without_binding_is_reported(ontology):
    d = parse_document(
        "(define (domain example-ur5-domain) (:predicates (insertable ?a ?b))"
        " (:action go :parameters (?a ?b) :precondition (insertable ?a ?b) :effect (not (insertable ?a ?b))))"
    )
    p = parse_document("(define (problem q) (:domain example-ur5-domain) (:goal (and)))")
    bundle = resolve(p, [d], ontology)
    assert bundle.injected == []
    assert {x.code for x in bundle.diagnostics} == {"unbound-role"}


def test_role_with_wrong_arity_is_reported(ontology):
    d = parse_document(
        f"(define (domain d) (:context insertable - {ACTION}insertable) (:predicates (insertable ?a)))"
    )
    p = parse_document(
        f"(define (problem q) (:domain d) (:context c1 - {EX}CylindricalPillar_1 h4 - {EX}CylindricalHole_4)"
        " (:objects c1 h4) (:goal (and)))"
    )
    bundle = resolve(p, [d], ontology)
    assert bundle.injected == []
    assert [x.code for x in bundle.diagnostics] == ["role-arity", "role-arity"]


def test_objects_are_found_through_any_context(ontology):
    # the problem uses short names bound to the ontology IRIs
    d = parse_document(
        f"(define (domain d) (:context fits - {ACTION}insertable) (:predicates (fits ?a ?b)))"
    )
    p = parse_document(
        f"(define (problem q) (:domain d) (:context c1 - {EX}CylindricalPillar_1 h4 - {EX}CylindricalHole_4"
        f" t2 - {EX}TriangularPillar_2 t5 - {EX}TriangularHole_5)"
        " (:objects c1 h4 t2 t5) (:goal (and)))"
    )
    bundle = resolve(p, [d], ontology)
    assert bundle.injected == [Atom("fits", ("c1", "h4")), Atom("fits", ("t2", "t5"))]
    assert not bundle.diagnostics


def test_shared_iri_under_two_names_is_unified(ontology):
    a = parse_document(
        f"(define (domain a) (:context insertable - {ACTION}insertable) (:predicates (insertable ?x ?y)))"
    )
    b = parse_document(
        f"(define (domain b) (:context fits - {ACTION}insertable) (:predicates (fits ?x ?y) (done ?x))"
        " (:action push :parameters (?x ?y) :precondition (fits ?x ?y) :effect (done ?x)))"
    )
    p = parse_document(
        f"(define (problem q) (:domain a) (:context c1 - {EX}CylindricalPillar_1 h4 - {EX}CylindricalHole_4)"
        " (:objects c1 h4) (:goal (done c1)))"
    )
    bundle = resolve(p, [a, b], ontology)
    assert [pr.name for pr in bundle.domain.predicates] == ["insertable", "done"]
    assert bundle.domain.actions[0].precondition == Atom("insertable", ("?x", "?y"))
    assert bundle.injected == [Atom("insertable", ("c1", "h4"))]
    assert [str(s) for s in solve(bundle.domain, bundle.problem)] == ["(push c1 h4)"]


def test_injected_atoms_are_sound(domain, problem, ontology):
    bundle = resolve(problem, [domain], ontology)
    objects = {o.name for o in bundle.problem.objects}
    derived = {(f.subject.value, f.object.value) for f in bundle.derived}
    for atom in bundle.injected:
        assert atom.name == "insertable"
        assert set(atom.args) <= objects
        iris = tuple(problem.context.get(x) for x in atom.args)
        assert iris in derived


def test_resolution_is_deterministic(domain, problem, ontology, tmp_path):
    texts = []
    for i in range(3):
        out = tmp_path / str(i)
        emit(resolve(problem, [domain], ontology), out)
        texts.append(((out / "domain.pddl").read_bytes(), (out / "problem.pddl").read_bytes()))
    assert texts[0] == texts[1] == texts[2]


extra_objects = st.lists(
    st.tuples(
        st.sampled_from(["CylindricalPillar", "TriangularPillar", "SquarePillar", "CylindricalHole", "TriangularHole", "SquareHole"]),
        st.decimals(min_value=0, max_value=6, places=1),
    ),
    max_size=6,
)


@settings(max_examples=40, deadline=None)
@given(extra_objects)
def test_adding_objects_never_removes_sparql_facts(extra):
    base = sparql_only()
    bigger = RdfGraph(base)
    for i, (cls, size) in enumerate(extra):
        node = Iri(f"{EX}extra_{i}")
        bigger.add(node, Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), Iri("uri:ex/shapes#" + cls))
        bigger.add(node, Iri("uri:ex/shapes#size"), Literal(str(size), XSD + "decimal"))
    _, small_facts = interpret(base)
    _, big_facts = interpret(bigger)
    assert set(small_facts) <= set(big_facts)


# --- emit --------------------------------------------------------------------


def test_emit_writes_the_injected_fact(domain, problem, ontology, tmp_path):
    d_path, p_path = emit(resolve(problem, [domain], ontology), tmp_path)
    emitted = parse_document(p_path.read_text())
    assert len(emitted.init) == 4
    assert INJECTED in emitted.init
    text = d_path.read_text() + p_path.read_text()
    assert ":context" not in text and ":semantics" not in text


def test_emit_matches_golden_files(domain, problem, tmp_path):
    emit(resolve(problem, [domain], RdfGraph()), tmp_path)
    golden = FIXTURES / "golden"
    for name in ("domain.pddl", "problem.pddl"):
        assert (tmp_path / name).read_text() == (golden / name).read_text()


def test_emitted_files_parse_as_plain_pddl(domain, problem, ontology, tmp_path):
    emit(resolve(problem, [domain], ontology), tmp_path)
    d = parse_document((tmp_path / "domain.pddl").read_text())
    assert not d.context
    assert ":semantics" not in d.requirements


def test_derived_fact_order_is_stable():
    a = DerivedFact(INSERTABLE, Iri("uri:b"), Iri("uri:a"))
    b = DerivedFact(INSERTABLE, Iri("uri:a"), Iri("uri:z"))
    assert sorted([a, b], key=lambda f: f.sort_key) == [b, a]
