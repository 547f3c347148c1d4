"""Term-to-IRI bindings carried by a ``(:context ...)`` block."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote

from .diagnostics import WARNING, Diagnostic
from .errors import ContextError

PDDL_PREFIX = "pddl"
PDDL_PREFIX_IRI = "uri:pddl"


def fold(symbol: str) -> str:
    """Key used for case-insensitive symbol comparison."""
    return symbol.casefold()


@dataclass(frozen=True)
class ContextMap:
    """Ordered ``(term, iri)`` bindings plus any remote context references.

    Terms are PDDL symbols and are looked up case-insensitively; IRIs are
    compared exactly.
    """

    entries: tuple[tuple[str, str], ...] = ()
    remote: tuple[str, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        index: dict[str, str] = {}
        for term, iri in self.entries:
            index.setdefault(fold(term), iri)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_pairs(cls, pairs, remote=()) -> "ContextMap":
        return cls(tuple((str(t), str(u)) for t, u in pairs), tuple(remote))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries) or bool(self.remote)

    def get(self, term: str) -> str | None:
        return self._index.get(fold(term))

    def terms(self) -> list[str]:
        return [t for t, _ in self.entries]

    def terms_for(self, iri: str) -> list[str]:
        return [t for t, u in self.entries if u == iri]

    def as_dict(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for term, iri in self.entries:
            out.setdefault(term, iri)
        return out


def expand(term: str, ctx: ContextMap) -> str | None:
    """Return the IRI bound to ``term``, or None for a purely local symbol."""
    return ctx.get(term)


def check_context(ctx: ContextMap) -> list[Diagnostic]:
    """Report duplicate terms and IRIs bound by more than one term."""
    diags: list[Diagnostic] = []
    seen_terms: dict[str, str] = {}
    seen_iris: dict[str, str] = {}
    for term, iri in ctx.entries:
        key = fold(term)
        if key in seen_terms:
            diags.append(Diagnostic("ERROR", "duplicate-term", f"term '{term}' is bound more than once"))
        else:
            seen_terms[key] = iri
        if key == PDDL_PREFIX:
            diags.append(Diagnostic("ERROR", "reserved-term", "the 'pddl' prefix cannot be rebound"))
        if iri in seen_iris and fold(seen_iris[iri]) != key:
            diags.append(
                Diagnostic(WARNING, "duplicate-iri", f"terms '{seen_iris[iri]}' and '{term}' both bind <{iri}>")
            )
        else:
            seen_iris.setdefault(iri, term)
    for iri in ctx.remote:
        diags.append(Diagnostic(WARNING, "remote-context", f"remote context <{iri}> is not resolved"))
    return diags


def remote_context_path(context_dir: Path, iri: str) -> Path | None:
    """Locate the local file standing in for a remote context IRI.

    Tried in order: ``<percent-encoded iri>.jsonld`` then ``<last path segment>.jsonld``.
    """
    candidates = [quote(iri, safe="") + ".jsonld"]
    tail = iri.rstrip("/").rsplit("/", 1)[-1]
    if tail:
        candidates.append(tail + ".jsonld")
    for name in candidates:
        path = Path(context_dir) / name
        if path.is_file():
            return path
    return None


def resolve_remote(ctx: ContextMap, context_dir: Path | None) -> ContextMap:
    """Inline remote contexts from ``context_dir``; never touches the network.

    Remote bindings come first so local term mappings take precedence.
    """
    if not ctx.remote:
        return ctx
    if context_dir is None:
        raise ContextError(f"remote context <{ctx.remote[0]}> needs a context directory")
    pairs: list[tuple[str, str]] = []
    for iri in ctx.remote:
        path = remote_context_path(context_dir, iri)
        if path is None:
            raise ContextError(f"no local file for remote context <{iri}> in {context_dir}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ContextError(f"cannot read context file {path}: {exc}") from exc
        obj = data.get("@context", data) if isinstance(data, dict) else None
        if not isinstance(obj, dict):
            raise ContextError(f"{path} has no @context object")
        for term, value in obj.items():
            if term == PDDL_PREFIX or term.startswith("@"):
                continue
            if not isinstance(value, str) or not value:
                raise ContextError(f"{path}: term '{term}' must map to a non-empty IRI string")
            pairs.append((term, value))
    local = {fold(t) for t, _ in ctx.entries}
    merged = [(t, u) for t, u in pairs if fold(t) not in local]
    return ContextMap(tuple(merged) + ctx.entries)
