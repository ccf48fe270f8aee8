import pytest

from dop.fragments import corpus_fragments, project_stsg
from dop.treebank import load_corpus, parse_bracketed

TOY_LINES = [
    "(S (NP John) (VP (V likes) (NP Mary)))",
    "(S (NP Peter) (VP (V hates) (NP Susan)))",
]

MARY_LIKES_SUSAN = "(S (NP Mary) (VP (V likes) (NP Susan)))"


@pytest.fixture
def toy_corpus():
    return load_corpus(TOY_LINES)


@pytest.fixture
def toy_bag(toy_corpus):
    return corpus_fragments(toy_corpus)


@pytest.fixture
def toy_grammar(toy_bag):
    return project_stsg(toy_bag, "S")


@pytest.fixture
def mls_tree():
    return parse_bracketed(MARY_LIKES_SUSAN)


def T(text):
    return parse_bracketed(text)


# --- acceptance report ----------------------------------------------------

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    return lambda line: request.config.stash.setdefault(
        _ACCEPTANCE, []).append(line)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda l: int(l.split()[1].rstrip("."))):
        terminalreporter.write_line(line)
