from pathlib import Path

import pytest

from pddls.rdf import merge_graphs, parse_turtle, rdfs_closure
from pddls.syntax import parse_document

FIXTURES = Path(__file__).parent / "fixtures"

EX = "uri:ex/demo2/"
SHAPES = "uri:ex/shapes#"
ACTION = "uri:ex/action/"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_ttl(*names):
    return merge_graphs([parse_turtle(fixture_text(n)) for n in names])


@pytest.fixture
def domain():
    return parse_document(fixture_text("domain.pddls"))


@pytest.fixture
def problem():
    return parse_document(fixture_text("problem.pddls"))


@pytest.fixture
def domain_verbatim():
    return parse_document(fixture_text("domain_verbatim.pddls"))


@pytest.fixture
def problem_verbatim():
    return parse_document(fixture_text("problem_verbatim.pddls"))


@pytest.fixture
def ontology():
    return load_ttl("commonsense.ttl", "objects.ttl")


@pytest.fixture
def closed(ontology):
    return rdfs_closure(ontology).freeze()


ACCEPTANCE_LOG = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE_LOG, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LOG, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
