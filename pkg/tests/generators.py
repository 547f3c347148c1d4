"""Seeded random instances and brute-force reference implementations.

Everything here is deliberately naive and shares no code with the package
beyond the data types, so it can serve as an independent oracle.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from pddls.context import ContextMap
from pddls.rdf.graph import RdfGraph
from pddls.rdf.terms import XSD, Iri, Literal
from pddls.syntax import (
    ActionDef,
    And,
    Atom,
    Not,
    PddlsDocument,
    PredicateDecl,
    TypedName,
)

# --- SPARQL ----------------------------------------------------------------

XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_STRING = XSD + "string"

NODES = [Iri(f"uri:g/n{i}") for i in range(5)]
PREDICATES = [Iri(f"uri:g/p{i}") for i in range(3)]
LITERALS = [
    Literal("1", XSD_INTEGER),
    Literal("2.0", XSD_DECIMAL),
    Literal("2", XSD_INTEGER),
    Literal("3.5", XSD_DECIMAL),
    Literal("red", XSD_STRING),
    Literal("blue", XSD_STRING),
]
VAR_NAMES = ["a", "b", "c", "d"]
OPS = ["<", "<=", "=", "!=", ">=", ">"]


def random_graph(rng: random.Random, max_triples: int = 200) -> RdfGraph:
    g = RdfGraph()
    size = rng.randint(0, max_triples) if rng.random() < 0.2 else rng.randint(max_triples // 4, max_triples)
    for _ in range(size):
        s = rng.choice(NODES)
        p = rng.choice(PREDICATES)
        o = rng.choice(NODES + LITERALS)
        g.add(s, p, o)
    return g


def term_text(term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if term.datatype == XSD_STRING:
        return f'"{term.lexical}"'
    return f'"{term.lexical}"^^<{term.datatype}>'


def random_query(rng: random.Random, max_patterns: int = 4, max_filters: int = 2) -> str:
    """A SELECT DISTINCT query over the shared vocabulary, as text.

    Patterns mostly chain through fresh variables; a minority reuse variables
    arbitrarily or put variables in predicate position.
    """
    used: list[str] = []
    objects: list[str] = []

    def var(fresh_bias: float) -> str:
        fresh = [v for v in VAR_NAMES if v not in used]
        if fresh and (not used or rng.random() < fresh_bias):
            name = fresh[0]
        else:
            name = rng.choice(used or VAR_NAMES)
        if name not in used:
            used.append(name)
        return "?" + name

    patterns = []
    for _ in range(rng.randint(1, max_patterns)):
        s = var(0.3) if rng.random() < 0.85 else term_text(rng.choice(NODES))
        p = var(0.5) if rng.random() < 0.1 else term_text(rng.choice(PREDICATES))
        if rng.random() < 0.75:
            o = var(0.7)
            objects.append(o)
        else:
            o = term_text(rng.choice(NODES + LITERALS))
        patterns.append(f"{s} {p} {o} .")
    if not used:
        patterns.append(f"?a {term_text(rng.choice(PREDICATES))} ?b .")
        used, objects = ["a", "b"], ["?b"]
    filters = []
    for _ in range(rng.randint(0, max_filters)):
        left = rng.choice(objects) if objects and rng.random() < 0.8 else "?" + rng.choice(used)
        if rng.random() < 0.35:
            right = rng.choice(objects) if objects else "?" + rng.choice(used)
        else:
            right = term_text(rng.choice(LITERALS + NODES[:2]))
        filters.append(f"FILTER ({left} {rng.choice(OPS)} {right})")
    projected = rng.sample(used, rng.randint(1, len(used)))
    body = "\n  ".join(patterns + filters)
    return f"SELECT DISTINCT {' '.join('?' + v for v in projected)}\nWHERE {{\n  {body}\n}}"


def _oracle_number(term):
    numeric = {XSD_INTEGER, XSD_DECIMAL, XSD + "double", XSD + "float"}
    if isinstance(term, Literal) and term.datatype in numeric:
        try:
            return Fraction(term.lexical)
        except ValueError:
            return None
    return None


def oracle_compare(left, op: str, right):
    """True/False, or None for a type error."""
    a, b = _oracle_number(left), _oracle_number(right)
    if a is not None and b is not None:
        return {"<": a < b, "<=": a <= b, "=": a == b, "!=": a != b, ">=": a >= b, ">": a > b}[op]
    if (a is None) != (b is None):
        return None
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    return None


def oracle_select(query, g: RdfGraph) -> set:
    """Enumerate every total assignment of the query variables to graph terms."""
    triples = set(g)
    terms = sorted({t for tr in triples for t in tr}, key=repr)
    variables = sorted({t for pat in query.bgp for t in pat if type(t).__name__ == "Var"}, key=lambda v: v.name)
    results = set()
    for values in itertools.product(terms, repeat=len(variables)):
        env = dict(zip(variables, values))

        def val(t):
            return env.get(t, t) if type(t).__name__ == "Var" else t

        if not all((val(s), val(p), val(o)) in triples for s, p, o in query.bgp):
            continue
        ok = True
        for f in query.filters:
            if f.left not in env and type(f.left).__name__ == "Var":
                ok = False
                break
            if f.right not in env and type(f.right).__name__ == "Var":
                ok = False
                break
            if oracle_compare(val(f.left), f.op, val(f.right)) is not True:
                ok = False
                break
        if ok:
            results.add(tuple(env[v] for v in query.projected_vars))
    return results


# --- contexts --------------------------------------------------------------

TERM_POOL = ["avail", "available", "clear", "on", "holding", "pick", "place", "insertable", "grip"]
IRI_POOL = [f"uri:k/{n}" for n in range(8)]


def random_context(rng: random.Random, max_size: int = 6, distinct_iris: bool = False) -> ContextMap:
    """Unique terms; IRIs drawn from a small pool so aliases and collisions are common."""
    terms = rng.sample(TERM_POOL, rng.randint(0, max_size))
    # occasionally include a name that looks like a minted one
    if rng.random() < 0.2 and terms:
        terms.append(terms[0] + "_2")
    iris = rng.sample(IRI_POOL, len(terms)) if distinct_iris else [rng.choice(IRI_POOL) for _ in terms]
    return ContextMap(tuple(zip(terms, iris)))


def random_context_family(rng: random.Random):
    """A problem context (never renamed, so alias-free) and 1 to 4 domain contexts."""
    problem = random_context(rng, distinct_iris=True)
    domains = [(f"d{i}", random_context(rng)) for i in range(rng.randint(1, 4))]
    return problem, domains


def canonicalization_violations(problem: ContextMap, domains, translations, state) -> list[str]:
    """Check totality, IRI preservation, freshness and the naming biconditional."""
    problems = []
    input_bindings = {(t.casefold(), u) for t, u in problem.entries}
    for _, ctx in domains:
        input_bindings |= {(t.casefold(), u) for t, u in ctx.entries}
    input_terms = {t for t, _ in input_bindings}
    bound = list(problem.entries)
    for (dom_id, ctx), tr in zip(domains, translations):
        if set(tr.map) != {t for t, _ in ctx.entries}:
            problems.append(f"{dom_id}: map is not total on the context terms")
        for t, u in ctx.entries:
            new = tr.map[t]
            if state.sym_to_uri.get(new.casefold()) != u:
                problems.append(f"{dom_id}: {t} -> {new} does not preserve <{u}>")
            if new.casefold() in input_terms:
                if (new.casefold(), u) not in input_bindings:
                    problems.append(f"{dom_id}: {t} -> {new} reuses an input name bound to another IRI")
            else:
                stem, _, k = new.rpartition("_")
                if stem.casefold() not in input_terms or not k.isdigit() or int(k) < 2:
                    problems.append(f"{dom_id}: minted name {new} is not of the form <term>_<k>")
            bound.append((new, u))
    for s1, u1 in bound:
        for s2, u2 in bound:
            if (s1.casefold() == s2.casefold()) != (u1 == u2):
                problems.append(f"{s1}<{u1}> vs {s2}<{u2}>")
    return problems


# --- STRIPS ----------------------------------------------------------------


def random_strips(rng: random.Random, max_objects: int = 6, max_actions: int = 3):
    """A small untyped domain/problem pair with negative preconditions and goals."""
    objects = [f"o{i}" for i in range(rng.randint(1, max_objects))]
    n_preds = rng.randint(1, 3)
    arities = [rng.choice((0, 1, 1, 2)) if len(objects) <= 3 else rng.choice((0, 1)) for _ in range(n_preds)]
    preds = [PredicateDecl(f"p{i}", tuple(TypedName(f"?x{j}") for j in range(k))) for i, k in enumerate(arities)]
    actions = []
    for k in range(rng.randint(0, max_actions)):
        params = tuple(TypedName(f"?v{j}") for j in range(rng.randint(0, 2)))
        # keep grounding small: at most 36 instances per action
        args_pool = [p.name for p in params]

        def lit(positive: bool):
            pred = rng.choice(preds)
            args = tuple(rng.choice(args_pool) if args_pool and rng.random() < 0.8 else rng.choice(objects) for _ in range(pred.arity))
            atom = Atom(pred.name, args)
            return atom if positive else Not(atom)

        pre = [lit(rng.random() < 0.7) for _ in range(rng.randint(0, 2))]
        eff = [lit(rng.random() < 0.6) for _ in range(rng.randint(1, 3))]
        actions.append(ActionDef(f"act{k}", params, And(tuple(pre)) if pre else None, And(tuple(eff))))
    domain = PddlsDocument(
        kind="domain",
        name="rand",
        requirements=(":strips", ":negative-preconditions"),
        predicates=tuple(preds),
        actions=tuple(actions),
    )
    ground_atoms = [Atom(p.name, args) for p in preds for args in itertools.product(objects, repeat=p.arity)]
    init = tuple(a for a in ground_atoms if rng.random() < 0.3)
    goal_parts = [a if rng.random() < 0.6 else Not(a) for a in rng.sample(ground_atoms, min(len(ground_atoms), rng.randint(1, 3)))]
    problem = PddlsDocument(
        kind="problem",
        name="rand-p",
        domain_ref="rand",
        objects=tuple(TypedName(o) for o in objects),
        init=init,
        goal=And(tuple(goal_parts)),
    )
    return domain, problem


def shortest_plan_length(init: frozenset, goal, actions, max_depth: int) -> int | None:
    """Length of the shortest action sequence reaching ``goal``, by iterative deepening.

    Every sequence up to each depth is considered; a state already shown to
    fail with at least as much remaining depth is not expanded again. Uses its
    own goal test and transition function.
    """
    pos = {a for p, a in goal if p}
    neg = {a for p, a in goal if not p}

    def holds(state):
        return pos <= state and not (neg & state)

    def step(state, act):
        if not act.pre_pos <= state or act.pre_neg & state:
            return None
        return (state - act.delete) | act.add

    for depth in range(max_depth + 1):
        failed: dict = {}

        def dfs(state, remaining):
            if holds(state):
                return True
            if remaining == 0 or failed.get(state, -1) >= remaining:
                return False
            for act in actions:
                nxt = step(state, act)
                if nxt is not None and dfs(nxt, remaining - 1):
                    return True
            failed[state] = remaining
            return False

        if dfs(frozenset(init), depth):
            return depth
    return None


def reachable_goal(init: frozenset, goal, actions) -> bool:
    """Independent exhaustive reachability check (plain DFS over states)."""
    pos = {a for p, a in goal if p}
    neg = {a for p, a in goal if not p}
    seen = {frozenset(init)}
    stack = [frozenset(init)]
    while stack:
        s = stack.pop()
        if pos <= s and not (neg & s):
            return True
        for act in actions:
            if act.pre_pos <= s and not (act.pre_neg & s):
                n = (s - act.delete) | act.add
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
    return False
