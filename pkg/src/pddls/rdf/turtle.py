"""Turtle reader and writer for the subset used by ontology files.

Supported: ``@prefix``/``@base`` (and SPARQL-style ``PREFIX``/``BASE``),
``a``, ``;``/``,`` continuation, IRIs, prefixed names, blank node labels and
``[...]`` property lists, collections, short and long string literals with
language tags or datatypes, integer/decimal/double/boolean literals, ``#``
comments.
"""

from __future__ import annotations

import re

from ..errors import ParseError, UnknownPrefixError
from .graph import RdfGraph, fresh_bnode
from .lexer import Token, resolve_iri, tokenize, unescape_local
from .terms import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BNode,
    Iri,
    Literal,
    term_sort_key,
)


def number_literal(lexical: str) -> Literal:
    if re.search(r"[eE]", lexical):
        return Literal(lexical, XSD_DOUBLE)
    if "." in lexical:
        return Literal(lexical, XSD_DECIMAL)
    return Literal(lexical, XSD_INTEGER)


class _TurtleParser:
    def __init__(self, text: str, base: str | None) -> None:
        self.tokens = tokenize(text)
        self.i = 0
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.graph = RdfGraph()
        # labels written in the text keep their ids; anonymous nodes avoid them
        self.reserved = {t.value[2:] for t in self.tokens if t.kind == "BNODE"}

    def fresh(self) -> BNode:
        node = fresh_bnode()
        while node.id in self.reserved:
            node = fresh_bnode()
        return node

    # token helpers

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

    def expect_punct(self, value: str) -> Token:
        if self.tok.kind != "PUNCT" or self.tok.value != value:
            found = self.tok.value or "end of input"
            raise self.error(f"expected '{value}', found '{found}'")
        return self.advance()

    def at_punct(self, value: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.value == value

    # grammar

    def parse(self) -> RdfGraph:
        while self.tok.kind != "EOF":
            self.statement()
        self.graph.prefixes = dict(self.prefixes)
        return self.graph

    def statement(self) -> None:
        tok = self.tok
        if tok.kind == "AT" and tok.value in ("@prefix", "@base"):
            self.advance()
            self.directive(tok.value[1:], tok)
            self.expect_punct(".")
            return
        if tok.kind == "NAME" and tok.value.lower() in ("prefix", "base"):
            self.advance()
            self.directive(tok.value.lower(), tok)
            return
        self.triples()
        self.expect_punct(".")

    def directive(self, kind: str, at: Token) -> None:
        if kind == "prefix":
            name = self.advance()
            if name.kind != "PNAME" or not name.value.endswith(":") or name.value.count(":") != 1:
                raise self.error("expected a prefix name like 'ex:'", name)
            iri = self.advance()
            if iri.kind != "IRI":
                raise self.error("expected an IRI in angle brackets", iri)
            self.prefixes[name.value[:-1]] = resolve_iri(iri.value, self.base)
        else:
            iri = self.advance()
            if iri.kind != "IRI":
                raise self.error("expected an IRI in angle brackets", iri)
            self.base = resolve_iri(iri.value, self.base)

    def triples(self) -> None:
        if self.at_punct("["):
            subject = self.blank_property_list()
            if self.at_punct("."):
                return
        else:
            subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self):
        tok = self.tok
        if tok.kind in ("IRI", "PNAME"):
            return self.iri()
        if tok.kind == "BNODE":
            return self.bnode_label()
        if self.at_punct("("):
            return self.collection()
        raise self.error(f"expected a subject, found '{tok.value or 'end of input'}'")

    def predicate_object_list(self, subject) -> None:
        self.verb_object_list(subject)
        while self.at_punct(";"):
            while self.at_punct(";"):
                self.advance()
            if self.at_punct(".") or self.at_punct("]") or self.tok.kind == "EOF":
                return
            self.verb_object_list(subject)

    def verb_object_list(self, subject) -> None:
        tok = self.tok
        if tok.kind == "NAME" and tok.value == "a":
            self.advance()
            pred = RDF_TYPE
        elif tok.kind in ("IRI", "PNAME"):
            pred = self.iri()
        else:
            raise self.error(f"expected a predicate, found '{tok.value or 'end of input'}'")
        self.graph.add(subject, pred, self.object())
        while self.at_punct(","):
            self.advance()
            self.graph.add(subject, pred, self.object())

    def object(self):
        tok = self.tok
        if tok.kind in ("IRI", "PNAME"):
            return self.iri()
        if tok.kind == "BNODE":
            return self.bnode_label()
        if self.at_punct("["):
            return self.blank_property_list()
        if self.at_punct("("):
            return self.collection()
        if tok.kind == "STRING":
            self.advance()
            if self.tok.kind == "AT":
                lang = self.advance().value[1:]
                return Literal(tok.value, lang=lang)
            if self.tok.kind == "DTYPE":
                self.advance()
                return Literal(tok.value, self.iri().value)
            return Literal(tok.value, XSD_STRING)
        if tok.kind == "NUMBER":
            self.advance()
            return number_literal(tok.value)
        if tok.kind == "NAME" and tok.value in ("true", "false"):
            self.advance()
            return Literal(tok.value, XSD_BOOLEAN)
        raise self.error(f"expected an object, found '{tok.value or 'end of input'}'")

    def iri(self) -> Iri:
        tok = self.advance()
        if tok.kind == "IRI":
            return Iri(resolve_iri(tok.value, self.base))
        if tok.kind == "PNAME":
            prefix, _, local = tok.value.partition(":")
            if prefix not in self.prefixes:
                raise UnknownPrefixError(f"unknown prefix '{prefix}:'", tok.line, tok.column)
            return Iri(self.prefixes[prefix] + unescape_local(local))
        raise self.error(f"expected an IRI, found '{tok.value or 'end of input'}'", tok)

    def bnode_label(self) -> BNode:
        return BNode(self.advance().value[2:])

    def blank_property_list(self) -> BNode:
        self.expect_punct("[")
        node = self.fresh()
        if not self.at_punct("]"):
            self.predicate_object_list(node)
        self.expect_punct("]")
        return node

    def collection(self):
        self.expect_punct("(")
        items = []
        while not self.at_punct(")"):
            if self.tok.kind == "EOF":
                raise self.error("unterminated collection")
            items.append(self.object())
        self.advance()
        if not items:
            return RDF_NIL
        head = self.fresh()
        node = head
        for k, item in enumerate(items):
            self.graph.add(node, RDF_FIRST, item)
            nxt = self.fresh() if k + 1 < len(items) else RDF_NIL
            self.graph.add(node, RDF_REST, nxt)
            node = nxt
        return head


def parse_turtle(text: str, base: str | None = None) -> RdfGraph:
    """Parse Turtle ``text`` into a new graph."""
    return _TurtleParser(text, base).parse()


# --- serialization ---------------------------------------------------------

_LOCAL_RE = re.compile(r"(?:[A-Za-z0-9_](?:[A-Za-z0-9_.-]*[A-Za-z0-9_-])?)?")
_BARE_NUMBER = {
    XSD_INTEGER: re.compile(r"[+-]?\d+"),
    XSD_DECIMAL: re.compile(r"[+-]?\d*\.\d+"),
    XSD_DOUBLE: re.compile(r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    XSD_BOOLEAN: re.compile(r"true|false"),
}


def _escape_string(value: str) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _escape_iri(value: str) -> str:
    return "".join(
        f"\\u{ord(ch):04X}" if (ch in '<>"{}|^`\\' or ord(ch) <= 0x20) else ch for ch in value
    )


class _Writer:
    def __init__(self, prefixes: dict[str, str]) -> None:
        self.prefixes = sorted(prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))

    def iri(self, iri: Iri) -> str:
        for name, ns in self.prefixes:
            if ns and iri.value.startswith(ns) and _LOCAL_RE.fullmatch(iri.value[len(ns) :]):
                return f"{name}:{iri.value[len(ns):]}"
        return f"<{_escape_iri(iri.value)}>"

    def term(self, term) -> str:
        if isinstance(term, Iri):
            return self.iri(term)
        if isinstance(term, BNode):
            return f"_:{term.id}"
        bare = _BARE_NUMBER.get(term.datatype)
        if bare is not None and bare.fullmatch(term.lexical):
            return term.lexical
        text = f'"{_escape_string(term.lexical)}"'
        if term.lang:
            return f"{text}@{term.lang}"
        if term.datatype != XSD_STRING:
            return f"{text}^^{self.iri(Iri(term.datatype))}"
        return text


def serialize_turtle(g: RdfGraph) -> str:
    """Write ``g`` as Turtle, grouped by subject in sorted order."""
    w = _Writer(g.prefixes)
    lines = [f"@prefix {name}: <{_escape_iri(ns)}> ." for name, ns in sorted(g.prefixes.items())]
    if lines:
        lines.append("")
    by_subject: dict = {}
    for s, p, o in g:
        by_subject.setdefault(s, {}).setdefault(p, []).append(o)
    for s in sorted(by_subject, key=term_sort_key):
        preds = by_subject[s]
        parts = []
        for p in sorted(preds, key=term_sort_key):
            verb = "a" if p == RDF_TYPE else w.iri(p)
            objs = ", ".join(w.term(o) for o in sorted(preds[p], key=term_sort_key))
            parts.append(f"{verb} {objs}")
        if len(parts) == 1:
            lines.append(f"{w.term(s)} {parts[0]} .")
        else:
            lines.append(f"{w.term(s)}\n    " + " ;\n    ".join(parts) + " .")
    return "\n".join(lines) + ("\n" if lines else "")
