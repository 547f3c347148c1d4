"""A SELECT-only SPARQL fragment: basic graph patterns with comparison filters.

Grammar handled::

    PREFIX p: <iri>  BASE <iri>
    SELECT [DISTINCT] ?a ?b ... | *
    WHERE { triple patterns (with ; and ,) . FILTER (cmp [&& cmp ...]) }

where ``cmp`` is ``operand op operand`` with ``op`` one of
``< <= = != >= >``. Results are always de-duplicated.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Iterator, Union

from .errors import ParseError, UnknownPrefixError, UnsupportedFeatureError
from .rdf.graph import RdfGraph
from .rdf.lexer import Token, resolve_iri, tokenize, unescape_local
from .rdf.terms import RDF_TYPE, XSD_BOOLEAN, XSD_STRING, Iri, Literal, numeric_value, term_sort_key
from .rdf.turtle import number_literal

COMPARISON_OPS = ("<", "<=", "=", "!=", ">=", ">")

_UNSUPPORTED_KEYWORDS = {
    "optional",
    "union",
    "minus",
    "graph",
    "service",
    "bind",
    "values",
    "order",
    "limit",
    "offset",
    "group",
    "having",
    "construct",
    "describe",
    "ask",
    "insert",
    "delete",
    "exists",
    "not",
    "from",
    "count",
    "sum",
    "min",
    "max",
    "avg",
    "sample",
}


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Var, Iri, Literal]


@dataclass(frozen=True)
class Comparison:
    left: PatternTerm
    op: str
    right: PatternTerm

    def variables(self) -> set[Var]:
        return {t for t in (self.left, self.right) if isinstance(t, Var)}


@dataclass(frozen=True)
class Query:
    prefixes: tuple[tuple[str, str], ...]
    projected_vars: tuple[Var, ...]
    bgp: tuple[tuple[PatternTerm, PatternTerm, PatternTerm], ...]
    filters: tuple[Comparison, ...]
    distinct: bool = True

    def variables(self) -> list[Var]:
        seen: dict[Var, None] = {}
        for pattern in self.bgp:
            for t in pattern:
                if isinstance(t, Var):
                    seen.setdefault(t)
        return list(seen)


class ResultSet:
    """Distinct solution tuples, iterated in sorted order."""

    def __init__(self, variables, rows=()) -> None:
        self.variables = tuple(variables)
        self._rows = set(rows)

    def add(self, row: tuple) -> None:
        self._rows.add(row)

    def __len__(self) -> int:
        return len(self._rows)

    def __iter__(self) -> Iterator[tuple]:
        return iter(sorted(self._rows, key=lambda row: tuple(term_sort_key(t) for t in row)))

    def __contains__(self, row) -> bool:
        return tuple(row) in self._rows

    def __eq__(self, other) -> bool:
        if isinstance(other, ResultSet):
            return self._rows == other._rows
        return self._rows == set(other)

    __hash__ = None

    def as_set(self) -> set[tuple]:
        return set(self._rows)

    def __repr__(self) -> str:
        return f"ResultSet({list(self)})"


# --- parsing ---------------------------------------------------------------


class _QueryParser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.base: str | None = None

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def keyword(self) -> str | None:
        return self.tok.value.lower() if self.tok.kind == "NAME" else None

    def is_punct(self, value: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.value == value

    def expect_punct(self, value: str) -> None:
        if not self.is_punct(value):
            raise self.error(f"expected '{value}', found '{self.tok.value or 'end of input'}'")
        self.advance()

    def check_supported(self) -> None:
        kw = self.keyword()
        if kw in _UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeatureError(f"{self.tok.value.upper()} is not supported (line {self.tok.line})")

    def parse(self) -> Query:
        while self.keyword() in ("prefix", "base"):
            kw = self.advance().value.lower()
            if kw == "prefix":
                name = self.advance()
                if name.kind != "PNAME" or not name.value.endswith(":") or name.value.count(":") != 1:
                    raise self.error("expected a prefix name like 'ex:'", name)
                iri = self.advance()
                if iri.kind != "IRI":
                    raise self.error("expected an IRI", iri)
                self.prefixes[name.value[:-1]] = resolve_iri(iri.value, self.base)
            else:
                iri = self.advance()
                if iri.kind != "IRI":
                    raise self.error("expected an IRI", iri)
                self.base = resolve_iri(iri.value, self.base)
        self.check_supported()
        if self.keyword() != "select":
            raise self.error(f"expected SELECT, found '{self.tok.value or 'end of input'}'")
        self.advance()
        distinct = False
        if self.keyword() in ("distinct", "reduced"):
            distinct = True
            self.advance()
        projected: list[Var] = []
        star = False
        if self.is_punct("*"):
            star = True
            self.advance()
        else:
            while self.tok.kind == "VAR":
                projected.append(Var(self.advance().value[1:]))
            if self.is_punct("("):
                raise UnsupportedFeatureError("projection expressions are not supported")
            if not projected:
                raise self.error("SELECT needs at least one variable or *")
        self.check_supported()
        if self.keyword() == "where":
            self.advance()
        self.expect_punct("{")
        bgp, filters = self.group()
        self.expect_punct("}")
        self.check_supported()
        if self.tok.kind != "EOF":
            raise self.error(f"unexpected '{self.tok.value}' after the query body")
        query = Query(tuple(sorted(self.prefixes.items())), (), tuple(bgp), tuple(filters), distinct)
        in_bgp = query.variables()
        if star:
            projected = in_bgp
        for v in projected:
            if v not in in_bgp:
                raise ParseError(f"projected variable ?{v.name} does not occur in the graph pattern")
        if len(set(projected)) != len(projected):
            raise ParseError("a variable is projected twice")
        return Query(query.prefixes, tuple(projected), query.bgp, query.filters, distinct)

    def group(self):
        bgp: list = []
        filters: list[Comparison] = []
        while not self.is_punct("}"):
            if self.tok.kind == "EOF":
                raise self.error("unterminated group pattern")
            self.check_supported()
            if self.is_punct("{"):
                raise UnsupportedFeatureError(f"nested group patterns are not supported (line {self.tok.line})")
            if self.keyword() == "select":
                raise UnsupportedFeatureError("subqueries are not supported")
            if self.keyword() == "filter":
                self.advance()
                filters.extend(self.filter())
            else:
                self.triples_block(bgp)
            if self.is_punct("."):
                self.advance()
        return bgp, filters

    def triples_block(self, bgp: list) -> None:
        subject = self.term(position="subject")
        while True:
            pred = self.verb()
            while True:
                bgp.append((subject, pred, self.term(position="object")))
                if self.is_punct(","):
                    self.advance()
                    continue
                break
            if self.is_punct(";"):
                while self.is_punct(";"):
                    self.advance()
                if self.is_punct(".") or self.is_punct("}") or self.keyword() == "filter":
                    return
                continue
            return

    def verb(self):
        if self.tok.kind == "NAME" and self.tok.value == "a":
            self.advance()
            pred = RDF_TYPE
        else:
            pred = self.term(position="predicate")
            if isinstance(pred, Literal):
                raise self.error("a literal cannot be a predicate")
        if self.tok.kind == "PUNCT" and self.tok.value in "/|^*+?":
            raise UnsupportedFeatureError(f"property paths are not supported (line {self.tok.line})")
        return pred

    def term(self, position: str):
        tok = self.tok
        if tok.kind == "PUNCT" and tok.value in "^(":
            raise UnsupportedFeatureError(f"property paths and collections are not supported (line {tok.line})")
        if tok.kind == "PUNCT" and tok.value == "[":
            raise UnsupportedFeatureError(f"blank node patterns are not supported (line {tok.line})")
        if tok.kind == "VAR":
            self.advance()
            return Var(tok.value[1:])
        if tok.kind == "IRI":
            self.advance()
            return Iri(resolve_iri(tok.value, self.base))
        if tok.kind == "PNAME":
            self.advance()
            prefix, _, local = tok.value.partition(":")
            if prefix not in self.prefixes:
                raise UnknownPrefixError(f"unknown prefix '{prefix}:'", tok.line, tok.column)
            return Iri(self.prefixes[prefix] + unescape_local(local))
        if tok.kind == "BNODE":
            raise UnsupportedFeatureError(f"blank node patterns are not supported (line {tok.line})")
        if position != "predicate":
            lit = self.literal()
            if lit is not None:
                return lit
        raise self.error(f"expected a {position}, found '{tok.value or 'end of input'}'")

    def literal(self) -> Literal | None:
        tok = self.tok
        if tok.kind == "STRING":
            self.advance()
            if self.tok.kind == "AT":
                return Literal(tok.value, lang=self.advance().value[1:])
            if self.tok.kind == "DTYPE":
                self.advance()
                dt = self.term(position="datatype")
                return Literal(tok.value, dt.value)
            return Literal(tok.value, XSD_STRING)
        if tok.kind == "NUMBER":
            self.advance()
            return number_literal(tok.value)
        if tok.kind == "NAME" and tok.value in ("true", "false"):
            self.advance()
            return Literal(tok.value, XSD_BOOLEAN)
        return None

    def filter(self) -> list[Comparison]:
        self.expect_punct("(")
        out = [self.comparison()]
        while self.tok.kind == "OP" and self.tok.value == "&&":
            self.advance()
            out.append(self.comparison())
        if self.tok.kind == "OP" and self.tok.value == "||":
            raise UnsupportedFeatureError("disjunction in FILTER is not supported")
        self.expect_punct(")")
        return out

    def operand(self):
        if self.tok.kind == "NAME" and self.tok.value not in ("true", "false"):
            raise UnsupportedFeatureError(f"function call '{self.tok.value}' in FILTER is not supported")
        if self.tok.kind == "OP" and self.tok.value == "!":
            raise UnsupportedFeatureError("negation in FILTER is not supported")
        if self.is_punct("("):
            raise UnsupportedFeatureError("nested FILTER expressions are not supported")
        return self.term(position="filter operand")

    def comparison(self) -> Comparison:
        left = self.operand()
        if self.tok.kind != "OP" or self.tok.value not in COMPARISON_OPS:
            if self.tok.kind == "PUNCT" and self.tok.value in "+-*/":
                raise UnsupportedFeatureError("arithmetic in FILTER is not supported")
            raise self.error(f"expected a comparison operator, found '{self.tok.value or 'end of input'}'")
        op = self.advance().value
        right = self.operand()
        return Comparison(left, op, right)


def parse_query(text: str) -> Query:
    """Parse a query in the supported SELECT/BGP/FILTER subset."""
    return _QueryParser(text).parse()


# --- evaluation ------------------------------------------------------------


class FilterError(Exception):
    """Type error inside a FILTER; the candidate solution is discarded."""


def compare(left, op: str, right) -> bool:
    """SPARQL comparison with error-as-exception semantics.

    Numerics compare by exact value; ordering on anything else, or mixing a
    number with a non-number, raises :class:`FilterError`.
    """
    lnum, rnum = numeric_value(left), numeric_value(right)
    if lnum is not None and rnum is not None:
        return _apply(lnum, op, rnum)
    if (lnum is None) != (rnum is None):
        raise FilterError(f"cannot compare {left} with {right}")
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    raise FilterError(f"ordering is undefined for {left} and {right}")


def _apply(a: Decimal, op: str, b: Decimal) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == ">=":
        return a >= b
    return a > b


def _passes(flt: Comparison, binding: dict) -> bool:
    try:
        left = binding[flt.left] if isinstance(flt.left, Var) else flt.left
        right = binding[flt.right] if isinstance(flt.right, Var) else flt.right
        return compare(left, flt.op, right)
    except (FilterError, KeyError):
        return False


def _substitute(pattern, binding):
    return tuple(binding.get(t) if isinstance(t, Var) else t for t in pattern)


def _selectivity(pattern, binding, g: RdfGraph) -> tuple:
    ground = _substitute(pattern, binding)
    bound = sum(t is not None for t in ground)
    return (-bound, g.count(*ground) if bound else len(g))


def solutions(q: Query, g: RdfGraph) -> Iterator[dict]:
    """Yield every full variable binding satisfying the pattern and filters.

    Patterns are joined one at a time, always picking the pending pattern
    with the most bound positions (then the fewest matches). Filters run as
    soon as all their variables are bound.
    """
    filters = list(q.filters)
    all_vars = set(q.variables())
    dangling = [f for f in filters if not f.variables() <= all_vars]
    if dangling:
        return  # a filter over an unbound variable is an error for every solution
    ready = [f for f in filters if not f.variables()]
    if not all(_passes(f, {}) for f in ready):
        return
    pending_filters = [f for f in filters if f.variables()]

    def extend(binding: dict, remaining: list, flts: list) -> Iterator[dict]:
        if not remaining:
            yield binding
            return
        best = min(range(len(remaining)), key=lambda k: (_selectivity(remaining[k], binding, g), k))
        pattern = remaining[best]
        rest = remaining[:best] + remaining[best + 1 :]
        ground = _substitute(pattern, binding)
        for triple in g.triples(*ground):
            new = dict(binding)
            ok = True
            for slot, value in zip(pattern, triple):
                if isinstance(slot, Var):
                    prev = new.get(slot)
                    if prev is None:
                        new[slot] = value
                    elif prev != value:
                        ok = False
                        break
            if not ok:
                continue
            now = [f for f in flts if f.variables() <= new.keys()]
            if not all(_passes(f, new) for f in now):
                continue
            yield from extend(new, rest, [f for f in flts if f not in now])

    if not q.bgp:
        yield {}
        return
    yield from extend({}, list(q.bgp), pending_filters)


def evaluate(q: Query, g: RdfGraph) -> ResultSet:
    """Evaluate ``q`` over ``g`` and project onto the selected variables."""
    result = ResultSet(q.projected_vars)
    for binding in solutions(q, g):
        result.add(tuple(binding[v] for v in q.projected_vars))
    return result
