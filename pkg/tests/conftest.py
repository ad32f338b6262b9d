import os
import sys

import pytest

HERE = os.path.dirname(__file__)
ROOT = os.path.dirname(HERE)
CORPUS = os.path.join(ROOT, "corpus")
FIXTURES = os.path.join(HERE, "fixtures")
sys.path.insert(0, HERE)

from explind.session import Session, load_theory  # noqa: E402


def corpus(name):
    return os.path.join(CORPUS, name)


@pytest.fixture(scope="session")
def nat():
    """Shared read-only theory; tests that add events use `session`."""
    return load_theory(corpus("nat-constructor.thy")).theory


@pytest.fixture(scope="session")
def natd():
    return load_theory(corpus("nat-destructor.thy")).theory


@pytest.fixture(scope="session")
def natlist():
    return load_theory(corpus("list-base.thy")).theory


@pytest.fixture
def session():
    def make(*names, text=None):
        s = load_theory(*(corpus(n) for n in names))
        if text:
            r = s.load_text(text)
            assert r.ok, [(x.event.name, x.status, x.detail) for x in r.results]
        return s

    return make


def parse_clause(theory, text):
    from explind.parser import read_all

    return Session(theory).clause(read_all(text)[0])


def T(theory, text, sort=None):
    """Term from s-expression text; variable sorts are inferred."""
    from explind.parser import TermBuilder, read_all

    return TermBuilder(theory.symbols.get).term(read_all(text)[0], sort)


def C(theory, text):
    return parse_clause(theory, text)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
