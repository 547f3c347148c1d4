"""``pddls`` command-line front end.

Exit codes: 0 success, 1 unreadable or malformed input, 2 resolution or
rule error, 3 no plan exists.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .canonicalize import canonicalize_contexts
from .context import resolve_remote
from .diagnostics import Diagnostic, format_diagnostics
from .errors import (
    ContextError,
    GroundingError,
    ParseError,
    PddlsError,
    RepoError,
    ResolveError,
    RuleError,
    SchemaError,
    ShapeError,
    UnsupportedFeatureError,
)
from .jsonld import dumps, from_jsonld, to_jsonld
from .planner import format_plan, solve
from .rdf import merge_graphs, parse_turtle, rdfs_closure
from .rdf.graph import RdfGraph
from .repo import lookup_by_name, repo_add, repo_list, repo_lookup
from .resolver import emit, resolve
from .sparql import evaluate, parse_query
from .syntax import PddlsDocument, parse_document, print_pddl, validate_document

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_RESOLVE = 2
EXIT_NO_PLAN = 3


class _Fail(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    context_dir: Path | None = None
    closure_enabled: bool = True
    report_path: Path | None = None

    def __post_init__(self) -> None:
        if self.context_dir is not None and not Path(self.context_dir).is_dir():
            raise _Fail(EXIT_INPUT, f"context directory {self.context_dir} does not exist")


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise _Fail(EXIT_INPUT, f"{path} is not UTF-8") from exc


def load_document(path, expect: str | None = None) -> PddlsDocument:
    try:
        doc = parse_document(_read(path))
    except ParseError as exc:
        raise _Fail(EXIT_INPUT, f"{path}: {exc}") from exc
    if expect is not None and doc.kind != expect:
        raise _Fail(EXIT_INPUT, f"{path}: expected a PDDLS {expect}, found a {doc.kind}")
    return doc


def load_graph(paths) -> RdfGraph:
    graphs = []
    for path in paths:
        try:
            graphs.append(parse_turtle(_read(path)))
        except ParseError as exc:
            raise _Fail(EXIT_INPUT, f"{path}: {exc}") from exc
    return merge_graphs(graphs)


def _with_remote(doc: PddlsDocument, cfg: RunConfig) -> PddlsDocument:
    if not doc.context.remote:
        return doc
    return replace(doc, context=resolve_remote(doc.context, cfg.context_dir))


def _domains(sources, repo, problem: PddlsDocument) -> list[PddlsDocument]:
    out = []
    for src in sources:
        if Path(src).exists() or repo is None:
            out.append(load_document(src, "domain"))
            continue
        doc = repo_lookup(repo, src)
        if doc is None:
            raise _Fail(EXIT_INPUT, f"{src} is neither a file nor an IRI indexed in {repo}")
        out.append(doc)
    if not out and repo is not None and problem.domain_ref:
        doc = lookup_by_name(repo, problem.domain_ref)
        if doc is not None:
            out.append(doc)
    if not out:
        raise _Fail(EXIT_INPUT, "no domain given")
    return out


def _write_report(cfg: RunConfig, diags: list[Diagnostic]) -> None:
    if cfg.report_path is not None:
        Path(cfg.report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.report_path).write_text(format_diagnostics(diags), encoding="utf-8")


def resolve_files(cfg: RunConfig, problem_path, domain_sources, ontology_paths, repo=None):
    problem = _with_remote(load_document(problem_path, "problem"), cfg)
    domains = [_with_remote(d, cfg) for d in _domains(domain_sources, repo, problem)]
    graph = load_graph(ontology_paths)
    bundle = resolve(problem, domains, graph, closure=cfg.closure_enabled)
    diags = []
    for d in domains:
        diags.extend(validate_document(d))
    diags.extend(validate_document(problem))
    diags.extend(bundle.diagnostics)
    bundle.diagnostics = diags
    return bundle


def run_pipeline(cfg: RunConfig, problem, domain_sources, ontology, out_dir=None, repo=None, stdout=None) -> int:
    """Parse, resolve, emit, reparse the emitted PDDL and plan; returns the exit code."""
    stdout = stdout or sys.stdout
    bundle = resolve_files(cfg, problem, domain_sources, ontology, repo)
    _write_report(cfg, bundle.diagnostics)
    with tempfile.TemporaryDirectory(prefix="pddls-") as tmp:
        domain_path, problem_path = emit(bundle, out_dir or tmp)
        plan = solve(load_document(domain_path, "domain"), load_document(problem_path, "problem"))
    if plan is None:
        return EXIT_NO_PLAN
    stdout.write(format_plan(plan))
    return EXIT_OK


# --- subcommands -----------------------------------------------------------


def _cfg(args) -> RunConfig:
    return RunConfig(
        context_dir=Path(args.context_dir) if getattr(args, "context_dir", None) else None,
        closure_enabled=not getattr(args, "no_closure", False),
        report_path=Path(args.report) if getattr(args, "report", None) else None,
    )


def cmd_translate(args) -> int:
    src = Path(args.file)
    if src.suffix == ".json" or src.suffix == ".jsonld":
        try:
            doc = from_jsonld(json.loads(_read(src)))
        except ValueError as exc:
            raise _Fail(EXIT_INPUT, f"{src}: {exc}") from exc
        text = print_pddl(doc, strip_semantics=False)
    else:
        text = dumps(to_jsonld(load_document(src)))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    cfg = _cfg(args)
    problem = _with_remote(load_document(args.problem, "problem"), cfg)
    domains = [_with_remote(load_document(d, "domain"), cfg) for d in args.domain]
    _, translations = canonicalize_contexts(problem.context, [(d.name, d.context) for d in domains])
    out = []
    for tr in translations:
        out.append(f"# {tr.domain_id}\n")
        out.extend(f"{line}\n" for line in tr.lines())
    sys.stdout.write("".join(out))
    return EXIT_OK


def cmd_query(args) -> int:
    graph = load_graph(args.graph)
    if args.closure:
        graph = rdfs_closure(graph)
    try:
        query = parse_query(_read(args.sparql))
    except (ParseError, UnsupportedFeatureError) as exc:
        raise _Fail(EXIT_INPUT, f"{args.sparql}: {exc}") from exc
    result = evaluate(query, graph)
    sys.stdout.write("".join("\t".join(str(t) for t in row) + "\n" for row in result))
    return EXIT_OK


def cmd_resolve(args) -> int:
    cfg = _cfg(args)
    bundle = resolve_files(cfg, args.problem, args.domain, args.ontology + args.objects, args.repo)
    _write_report(cfg, bundle.diagnostics)
    for path in emit(bundle, args.output):
        print(path)
    return EXIT_OK


def cmd_plan(args) -> int:
    plan = solve(load_document(args.domain, "domain"), load_document(args.problem, "problem"))
    if plan is None:
        print("no plan", file=sys.stderr)
        return EXIT_NO_PLAN
    sys.stdout.write(format_plan(plan))
    return EXIT_OK


def cmd_run(args) -> int:
    code = run_pipeline(
        _cfg(args), args.problem, args.domain, args.ontology + args.objects, args.output, args.repo
    )
    if code == EXIT_NO_PLAN:
        print("no plan", file=sys.stderr)
    return code


def cmd_repo(args) -> int:
    if args.repo_cmd == "add":
        for f in args.files:
            repo_add(args.repo, f)
    elif args.repo_cmd == "list":
        for iri, rel in repo_list(args.repo):
            print(f"{iri}\t{rel}")
    else:
        doc = repo_lookup(args.repo, args.iri)
        if doc is None:
            raise _Fail(EXIT_INPUT, f"{args.iri} is not in the repository")
        sys.stdout.write(print_pddl(doc, strip_semantics=False))
    return EXIT_OK


def _resolve_flags(p: argparse.ArgumentParser, out_required: bool) -> None:
    p.add_argument("--problem", required=True)
    p.add_argument("--domain", action="append", default=[], help="domain file, or an IRI when --repo is set")
    p.add_argument("--ontology", action="append", default=[], help="Turtle file; repeatable")
    p.add_argument("--objects", action="append", default=[], help="Turtle file; repeatable")
    p.add_argument("-o", "--output", required=out_required, help="directory for domain.pddl and problem.pddl")
    p.add_argument("--report", help="write diagnostics to this file")
    p.add_argument("--context-dir", help="directory of local files for remote contexts")
    p.add_argument("--no-closure", action="store_true", help="skip RDFS closure")
    p.add_argument("--repo", help="domain repository directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pddls", description="PDDLS tools: translate, resolve against RDF, plan.")
    parser.add_argument("--version", action="version", version=f"pddls {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("translate", help="PDDLS to JSON-LD (or back, for .json/.jsonld input)")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("canonicalize", help="print per-domain symbol maps")
    p.add_argument("--problem", required=True)
    p.add_argument("--domain", action="append", default=[], required=True)
    p.add_argument("--context-dir")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("query", help="evaluate a SELECT query over Turtle graphs")
    p.add_argument("--graph", action="append", required=True)
    p.add_argument("--sparql", required=True)
    p.add_argument("--closure", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("resolve", help="derive facts and emit plain PDDL")
    _resolve_flags(p, out_required=True)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("plan", help="plan on plain PDDL files")
    p.add_argument("--problem", required=True)
    p.add_argument("--domain", required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="resolve, emit and plan in one step")
    _resolve_flags(p, out_required=False)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("repo", help="domain repository")
    p.add_argument("--repo", required=True, help="repository directory")
    rsub = p.add_subparsers(dest="repo_cmd", required=True)
    r = rsub.add_parser("add")
    r.add_argument("files", nargs="+")
    rsub.add_parser("list")
    r = rsub.add_parser("get")
    r.add_argument("iri")
    p.set_defaults(func=cmd_repo)
    return parser


def main(argv=None) -> int:
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2, which here means a resolve error
        return EXIT_INPUT if exc.code == 2 else exc.code
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"pddls: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, SchemaError, UnsupportedFeatureError) as exc:
        print(f"pddls: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ResolveError, RuleError, ContextError, ShapeError, GroundingError, RepoError) as exc:
        print(f"pddls: {exc}", file=sys.stderr)
        return EXIT_RESOLVE
    except PddlsError as exc:
        print(f"pddls: {exc}", file=sys.stderr)
        return EXIT_RESOLVE
    except OSError as exc:
        print(f"pddls: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
