"""A file-based store of PDDLS domains keyed by IRI.

The repository is a directory holding domain files and ``index.tsv``::

    #version	1
    uri:ex/action/pick-n-insert	example-ur5-domain.pddls

Each domain is indexed under the IRIs its context binds to its own name and
to its action names. Index writes go through a temporary file and an atomic
rename while an advisory lock is held.
"""

from __future__ import annotations

import fcntl
import os
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .context import fold
from .errors import DuplicateIriError, ParseError, RepoError, RepoIndexError
from .syntax import PddlsDocument, parse_document

INDEX_NAME = "index.tsv"
LOCK_NAME = ".index.lock"
FORMAT_VERSION = 1
_HEADER = f"#version\t{FORMAT_VERSION}"


@dataclass
class RepoIndex:
    root: Path
    entries: dict[str, str] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def path_for(self, iri: str) -> Path | None:
        rel = self.entries.get(iri)
        return None if rel is None else self.root / rel

    def render(self) -> str:
        lines = [_HEADER] + [f"{iri}\t{rel}" for iri, rel in sorted(self.entries.items())]
        return "\n".join(lines) + "\n"


def _hint(root: Path) -> str:
    return f"restore {root / INDEX_NAME} from version control, or delete it and re-add the domain files with 'pddls repo add'"


def read_index(root) -> RepoIndex:
    """Load ``index.tsv``; a missing index is an empty repository."""
    root = Path(root)
    path = root / INDEX_NAME
    if not path.exists():
        return RepoIndex(root)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise RepoIndexError(f"{path} is not UTF-8 text; {_hint(root)}") from exc
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise RepoIndexError(f"{path}: missing or unknown version header; {_hint(root)}")
    index = RepoIndex(root)
    for n, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise RepoIndexError(f"{path}, line {n}: expected 'IRI<TAB>path'; {_hint(root)}")
        iri, rel = parts
        if iri in index.entries:
            raise RepoIndexError(f"{path}, line {n}: IRI {iri} listed twice; {_hint(root)}")
        if Path(rel).is_absolute() or ".." in Path(rel).parts:
            raise RepoIndexError(f"{path}, line {n}: path {rel!r} escapes the repository; {_hint(root)}")
        index.entries[iri] = rel
    return index


def _write_index(index: RepoIndex) -> None:
    fd, tmp = tempfile.mkstemp(prefix=".index.", suffix=".tmp", dir=index.root)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(index.render())
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, index.root / INDEX_NAME)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@contextmanager
def _locked(root: Path):
    with open(root / LOCK_NAME, "a+") as fh:
        fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)


def domain_iris(doc: PddlsDocument) -> list[str]:
    """IRIs bound to the domain's own name or to one of its actions."""
    names = [doc.name] + [a.name for a in doc.actions]
    out: list[str] = []
    for name in names:
        iri = doc.context.get(name)
        if iri is not None and iri not in out:
            out.append(iri)
    return out


def _target_name(root: Path, doc: PddlsDocument, source: Path) -> str:
    stem = "".join(c if c.isalnum() or c in "-_." else "_" for c in doc.name) or "domain"
    suffix = source.suffix if source.suffix in (".pddls", ".pddl") else ".pddls"
    candidate, k = f"{stem}{suffix}", 2
    while (root / candidate).exists():
        if (root / candidate).read_bytes() == source.read_bytes():
            return candidate
        candidate, k = f"{stem}_{k}{suffix}", k + 1
    return candidate


def repo_add(root, file) -> RepoIndex:
    """Copy a domain file into the repository and index it by its IRIs."""
    root, file = Path(root), Path(file)
    text = file.read_text(encoding="utf-8")
    doc = parse_document(text)
    if doc.kind != "domain":
        raise ParseError(f"{file} is a PDDLS {doc.kind}, expected a domain", 1, 1)
    iris = domain_iris(doc)
    if not iris:
        raise RepoError(f"{file}: the context binds neither the domain name nor any action name to an IRI")
    root.mkdir(parents=True, exist_ok=True)
    with _locked(root):
        index = read_index(root)
        taken = [iri for iri in iris if iri in index.entries]
        if taken:
            raise DuplicateIriError(f"IRI {taken[0]} is already indexed as {index.entries[taken[0]]}")
        rel = _target_name(root, doc, file)
        dest = root / rel
        if not dest.exists():
            fd, tmp = tempfile.mkstemp(prefix=".add.", dir=root)
            os.close(fd)
            shutil.copyfile(file, tmp)
            os.replace(tmp, dest)
        for iri in iris:
            index.entries[iri] = rel
        _write_index(index)
    return index


def repo_lookup(root, iri: str) -> PddlsDocument | None:
    index = read_index(root)
    path = index.path_for(iri)
    if path is None:
        return None
    return parse_document(path.read_text(encoding="utf-8"))


def repo_list(root) -> list[tuple[str, str]]:
    return sorted(read_index(root).entries.items())


def lookup_by_name(root, name: str) -> PddlsDocument | None:
    """First indexed domain whose ``(domain NAME)`` matches ``name``."""
    for _, rel in repo_list(root):
        doc = parse_document((Path(root) / rel).read_text(encoding="utf-8"))
        if fold(doc.name) == fold(name):
            return doc
    return None
