"""Grounding and breadth-first forward search for STRIPS with negation.

States are frozensets of ground atoms under the closed-world assumption.
Supported requirements: ``:strips``, ``:typing``, ``:negative-preconditions``
and the negation-only slice of ``:adl``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .context import fold
from .errors import GroundingError, UnsupportedFeatureError
from .syntax import Formula, PddlsDocument, TypedName, literals

GroundAtom = tuple  # (predicate, arg1, ..., argN), all case-folded

SUPPORTED_REQUIREMENTS = frozenset(
    {":strips", ":typing", ":negative-preconditions", ":adl", ":semantics", ":equality"}
)


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre_pos: frozenset
    pre_neg: frozenset
    add: frozenset
    delete: frozenset

    def applicable(self, state: frozenset) -> bool:
        return self.pre_pos <= state and not (self.pre_neg & state)

    def apply(self, state: frozenset) -> frozenset:
        return (state - self.delete) | self.add

    def __str__(self) -> str:
        return "(" + " ".join((self.name,) + self.args) + ")"

    @property
    def sort_key(self) -> tuple:
        return (fold(self.name), tuple(fold(a) for a in self.args))


Plan = list  # list[GroundAction]


def atom_key(name: str, args) -> GroundAtom:
    return (fold(name),) + tuple(fold(a) for a in args)


def state_from(init) -> frozenset:
    """Closed-world state from a list of init literals; negated entries are ignored."""
    return frozenset(atom_key(a.name, a.args) for pos, a in _flatten(init) if pos)


def _flatten(formulas) -> list:
    out = []
    for f in formulas:
        out.extend(literals(f))
    return out


def goal_literals(goal: Formula | None) -> tuple[frozenset, frozenset]:
    lits = literals(goal)
    for _, atom in lits:
        if any(a.startswith("?") for a in atom.args):
            raise GroundingError(f"goal atom {atom.name} contains a variable")
    pos = frozenset(atom_key(a.name, a.args) for p, a in lits if p)
    neg = frozenset(atom_key(a.name, a.args) for p, a in lits if not p)
    return pos, neg


def goal_holds(state: frozenset, goal: tuple[frozenset, frozenset]) -> bool:
    pos, neg = goal
    return pos <= state and not (neg & state)


def _type_extensions(domain: PddlsDocument, objects: list[TypedName]) -> dict[str, list[str]]:
    parent: dict[str, str] = {fold(t.name): fold(t.type) for t in domain.types if t.type is not None}

    def ancestors(typ: str) -> list[str]:
        chain, seen = [typ], {typ}
        while chain[-1] in parent and parent[chain[-1]] not in seen:
            chain.append(parent[chain[-1]])
            seen.add(chain[-1])
        return chain

    ext: dict[str, list[str]] = {}
    for obj in objects:
        typ = fold(obj.type) if obj.type else "object"
        for t in ancestors(typ) + ["object"]:
            names = ext.setdefault(t, [])
            if obj.name not in names:
                names.append(obj.name)
    return ext


def check_requirements(*docs: PddlsDocument) -> None:
    for doc in docs:
        for req in doc.requirements:
            if fold(req) not in SUPPORTED_REQUIREMENTS:
                raise UnsupportedFeatureError(f"requirement {req} is not supported by the planner")
        if doc.extras:
            raise UnsupportedFeatureError(f"section {doc.extras[0][0]} is not supported by the planner")


def ground(domain: PddlsDocument, problem: PddlsDocument) -> list[GroundAction]:
    """Instantiate every action over the declared objects and constants.

    Parameters are matched against objects of their type (including subtypes);
    untyped parameters range over all objects. Ground actions with a
    contradictory precondition or an equality test that fails are dropped.
    """
    check_requirements(domain, problem)
    objects: list[TypedName] = []
    seen: set[str] = set()
    for obj in tuple(domain.constants) + tuple(problem.objects):
        if fold(obj.name) not in seen:
            seen.add(fold(obj.name))
            objects.append(obj)
    ext = _type_extensions(domain, objects)
    out: list[GroundAction] = []
    for act in domain.actions:
        params = [fold(p.name) for p in act.parameters]
        try:
            pre = literals(act.precondition)
            eff = literals(act.effect)
        except UnsupportedFeatureError as exc:
            raise UnsupportedFeatureError(f"action '{act.name}': {exc}") from exc
        for _, atom in pre + eff:
            for arg in atom.args:
                if arg.startswith("?") and fold(arg) not in params:
                    raise GroundingError(f"action '{act.name}': variable '{arg}' is not a parameter")
        domains = [ext.get(fold(p.type) if p.type else "object", []) for p in act.parameters]
        for combo in itertools.product(*domains):
            binding = dict(zip(params, combo))

            def inst(atom) -> GroundAtom:
                return atom_key(atom.name, [binding.get(fold(a), a) for a in atom.args])

            pre_pos, pre_neg, ok = set(), set(), True
            for positive, atom in pre:
                g = inst(atom)
                if g[0] == "=":
                    if len(g) != 3 or (g[1] == g[2]) != positive:
                        ok = False
                        break
                    continue
                (pre_pos if positive else pre_neg).add(g)
            if not ok or pre_pos & pre_neg:
                continue
            add = {inst(a) for p, a in eff if p}
            delete = {inst(a) for p, a in eff if not p} - add
            out.append(
                GroundAction(act.name, tuple(combo), frozenset(pre_pos), frozenset(pre_neg), frozenset(add), frozenset(delete))
            )
    out.sort(key=lambda a: a.sort_key)
    return out


def search(init: frozenset, goal: Formula | None, actions: list[GroundAction]) -> Plan | None:
    """Breadth-first search for a shortest plan; None when none exists.

    Successors are expanded in (name, args) order so results are stable.
    """
    target = goal_literals(goal)
    init = frozenset(init)
    if goal_holds(init, target):
        return []
    ordered = sorted(actions, key=lambda a: a.sort_key)
    parents: dict[frozenset, tuple[frozenset, GroundAction] | None] = {init: None}
    frontier = deque([init])
    while frontier:
        state = frontier.popleft()
        for act in ordered:
            if not act.applicable(state):
                continue
            nxt = act.apply(state)
            if nxt in parents:
                continue
            parents[nxt] = (state, act)
            if goal_holds(nxt, target):
                plan = []
                cur = nxt
                while parents[cur] is not None:
                    prev, step = parents[cur]
                    plan.append(step)
                    cur = prev
                return plan[::-1]
            frontier.append(nxt)
    return None


def validate_plan(init: frozenset, goal: Formula | None, plan: Plan) -> bool:
    """Simulate ``plan`` from ``init``; independent of :func:`search`."""
    state = set(init)
    for step in plan:
        if not step.pre_pos <= state or step.pre_neg & state:
            return False
        state -= step.delete
        state |= step.add
    pos, neg = goal_literals(goal)
    return pos <= state and not (neg & state)


def solve(domain: PddlsDocument, problem: PddlsDocument) -> Plan | None:
    return search(state_from(problem.init), problem.goal, ground(domain, problem))


def format_plan(plan: Plan) -> str:
    return "".join(f"{step}\n" for step in plan)
