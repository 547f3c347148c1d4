"""S-expression reader with source positions.

PDDL text is read into a tree of :class:`SAtom` and :class:`SList` nodes.
Comments start with ``;`` and run to the end of the line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import ParseError


@dataclass(frozen=True)
class SAtom:
    value: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator["SExpr"]:
        return iter(self.items)

    def __getitem__(self, index):
        return self.items[index]

    def __str__(self) -> str:
        return "(" + " ".join(str(i) for i in self.items) + ")"


SExpr = Union[SAtom, SList]

_DELIMS = frozenset("();")


def tokenize(text: str) -> Iterator[tuple[str, int, int]]:
    """Yield ``(token, line, column)``; tokens are ``(``, ``)`` or atoms."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in _DELIMS:
                i += 1
            yield text[start:i], line, col
            col += i - start


def read_all(text: str) -> list[SExpr]:
    """Read every top-level expression in ``text``."""
    stack: list[tuple[list[SExpr], int, int]] = []
    top: list[SExpr] = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
        else:
            (stack[-1][0] if stack else top).append(SAtom(tok, line, col))
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError("unbalanced '(' (never closed)", l0, c0)
    return top


def read_one(text: str) -> SExpr:
    exprs = read_all(text)
    if not exprs:
        raise ParseError("empty input", 1, 1)
    if len(exprs) > 1:
        extra = exprs[1]
        raise ParseError("unexpected trailing expression", extra.line, extra.column)
    return exprs[0]


def to_plain(expr: SExpr):
    """Strip positions: atoms become ``str``, lists become tuples."""
    if isinstance(expr, SAtom):
        return expr.value
    return tuple(to_plain(i) for i in expr.items)


def plain_to_text(plain) -> str:
    if isinstance(plain, str):
        return plain
    return "(" + " ".join(plain_to_text(i) for i in plain) + ")"
