"""Tokenizer shared by the Turtle and SPARQL parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError

_UCHAR = r"\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}"

_TOKEN_PATTERNS = [
    ("IRI", rf"<((?:[^<>\"{{}}|^`\\\x00-\x20]|{_UCHAR})*)>"),
    ("STRING_LONG", r'"""(?:[^"\\]|\\.|"(?!""))*"""' + r"|'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"' + r"|'(?:[^'\\\n\r]|\\.)*'"),
    ("AT", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("VAR", r"[?$][A-Za-z0-9_]+"),
    ("BNODE", r"_:[A-Za-z0-9_](?:[A-Za-z0-9_.-]*[A-Za-z0-9_-])?"),
    (
        "PNAME",
        r"(?:[A-Za-z](?:[A-Za-z0-9_.-]*[A-Za-z0-9_-])?)?:"
        r"(?:(?:[A-Za-z0-9_:%]|\\[-_~.!$&'()*+,;=/?#@%])"
        r"(?:(?:[A-Za-z0-9_.:%-]|\\[-_~.!$&'()*+,;=/?#@%])*(?:[A-Za-z0-9_:%-]|\\[-_~.!$&'()*+,;=/?#@%]))?)?",
    ),
    ("NUMBER", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+|\d*\.\d+|\d+)"),
    ("NAME", r"[A-Za-z_][A-Za-z0-9_-]*"),
    ("OP", r"<=|>=|!=|&&|\|\||[=<>!]"),
    ("PUNCT", r"[{}()\[\];,.*/|^+?]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_PATTERNS))
_SKIP_RE = re.compile(r"(?:[ \t\r\n]+|#[^\n]*)+")

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))", re.S)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int

    def __repr__(self) -> str:
        return f"{self.kind}({self.value!r}@{self.line}:{self.column})"


def unescape(text: str, line: int = 0, column: int = 0) -> str:
    def sub(m: re.Match) -> str:
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        ch = m.group(3)
        if ch not in _ESCAPES:
            raise ParseError(f"invalid escape sequence '\\{ch}'", line, column)
        return _ESCAPES[ch]

    return _ESCAPE_RE.sub(sub, text)


def unescape_local(text: str) -> str:
    """Undo the reserved-character escapes allowed in prefixed local names."""
    return re.sub(r"\\(.)", r"\1", text)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while True:
        m = _SKIP_RE.match(text, pos)
        if m:
            skipped = m.group(0)
            nl = skipped.count("\n")
            if nl:
                line += nl
                line_start = m.start() + skipped.rfind("\n") + 1
            pos = m.end()
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = m.lastgroup
        value = m.group(0)
        if kind in ("STRING_LONG", "STRING"):
            quote = 3 if kind == "STRING_LONG" else 1
            value = unescape(value[quote:-quote], line, column)
            kind = "STRING"
        elif kind == "IRI":
            value = unescape(value[1:-1], line, column)
        tokens.append(Token(kind, value, line, column))
        consumed = m.group(0)
        nl = consumed.count("\n")
        if nl:
            line += nl
            line_start = pos + consumed.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


def resolve_iri(ref: str, base: str | None) -> str:
    """Resolve a relative IRI reference against ``base``.

    Absolute references (with a scheme) are returned unchanged. Bases without
    an authority, such as ``uri:ex/demo2/``, resolve by path concatenation.
    """
    if re.match(r"^[A-Za-z][A-Za-z0-9+.-]*:", ref) or base is None:
        return ref
    if "://" in base:
        from urllib.parse import urljoin

        return urljoin(base, ref)
    if ref == "":
        return base.split("#", 1)[0]
    if ref.startswith("#"):
        return base.split("#", 1)[0] + ref
    stem = base.split("#", 1)[0]
    if ref.startswith("/"):
        scheme, _, _ = stem.partition(":")
        return f"{scheme}:{ref}"
    cut = stem.rfind("/")
    return (stem[: cut + 1] if cut >= 0 else stem) + ref
