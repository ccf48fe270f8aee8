import pytest
from hypothesis import given, settings, strategies as st

from dop.treebank import (
    Corpus, EmptyLabel, Label, RejectsOpenSites, Tree, UnbalancedParens,
    CorpusFormatError, load_corpus, parse_bracketed, serialize_tree,
    tree_yield,
)


def test_parse_figure1_tree():
    t = parse_bracketed("(S (NP John) (VP (V likes) (NP Mary)))")
    assert len(t) == 8
    assert [str(l) for l in tree_yield(t)] == ["John", "likes", "Mary"]
    assert all(l.terminal for l in tree_yield(t))


def test_parse_minimal():
    t = parse_bracketed("(NP Mary)")
    assert len(t) == 2
    assert t.label == "NP"
    assert t.children == (Tree("Mary", terminal=True),)


def test_open_sites():
    t = parse_bracketed("(S (NP) (VP))")
    assert [c.is_site for c in t.children] == [True, True]
    assert serialize_tree(t) == "(S (NP) (VP))"


def test_serialize_open_site_tree():
    t = Tree("S", [Tree("NP"), Tree("VP", [Tree("V", [Tree("likes", terminal=True)]),
                                          Tree("NP")])])
    assert serialize_tree(t) == "(S (NP) (VP (V likes) (NP)))"
    assert serialize_tree(parse_bracketed("(NP Mary)")) == "(NP Mary)"


def test_yield_with_sites():
    t = parse_bracketed("(S (NP) (VP (V likes) (NP)))")
    assert tree_yield(t) == [Label("NP", False), Label("likes", True),
                             Label("NP", False)]
    assert tree_yield(parse_bracketed("(NP Mary)")) == [Label("Mary", True)]


def test_whitespace_is_normalized():
    t = parse_bracketed("  (S\n  (NP  John)\t(VP (V likes) (NP Mary)) ) ")
    assert str(t) == "(S (NP John) (VP (V likes) (NP Mary)))"


@pytest.mark.parametrize("text, exc, offset", [
    ("(S (NP John)", UnbalancedParens, 0),
    ("(S (NP John)))", UnbalancedParens, 13),
    ("(S ((NP John)))", EmptyLabel, 3),
    ("()", EmptyLabel, 0),
    ("", EmptyLabel, 0),
    (")", UnbalancedParens, 0),
    ("(S a) (S b)", UnbalancedParens, 6),
])
def test_parse_errors_carry_offsets(text, exc, offset):
    with pytest.raises(exc) as info:
        parse_bracketed(text)
    assert info.value.offset == offset


def test_terminal_cannot_have_children():
    with pytest.raises(ValueError):
        Tree("x", [Tree("y", terminal=True)], terminal=True)


def test_labels_are_case_sensitive():
    assert parse_bracketed("(NP mary)") != parse_bracketed("(NP Mary)")
    assert parse_bracketed("(np Mary)") != parse_bracketed("(NP Mary)")


def test_trees_are_immutable():
    t = parse_bracketed("(NP Mary)")
    with pytest.raises(AttributeError):
        t.label = "VP"


def test_load_corpus_bag_semantics():
    c = load_corpus(["(S (NP a) (VP b))", "", "# comment",
                     "(S (NP a) (VP b))", "(S (NP c) (VP b))"])
    assert len(c) == 3
    assert len(c.distinct()) == 2
    assert c.multiplicity(parse_bracketed("(S (NP a) (VP b))")) == 2


def test_load_corpus_rejects_open_sites():
    with pytest.raises(CorpusFormatError) as info:
        load_corpus(["(S (NP a) (VP b))", "(S (NP))"])
    assert info.value.lineno == 2
    assert isinstance(info.value.cause, RejectsOpenSites)
    with pytest.raises(RejectsOpenSites):
        Corpus([parse_bracketed("(S (NP))")])


def test_load_corpus_reports_line_of_parse_error():
    with pytest.raises(CorpusFormatError) as info:
        load_corpus(["(S a)", "(S (NP a)"])
    assert info.value.lineno == 2
    assert "line 2" in str(info.value)


def test_depth_convention():
    assert parse_bracketed("(NP Mary)").depth() == 1
    assert parse_bracketed("(S (NP John) (VP (V likes) (NP Mary)))").depth() == 3
    assert parse_bracketed("Mary").depth() == 0


# --- property tests -------------------------------------------------------

labels = st.sampled_from(["S", "NP", "VP", "V", "PP", "X|"])
words = st.sampled_from(["a", "b", "Mary", "likes", "é", "x-y"])


@st.composite
def trees(draw, depth=4):
    label = draw(labels)
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        kind = draw(st.sampled_from(["site", "word", "pre"]))
        if kind == "site":
            return Tree(label)
        if kind == "word":
            return Tree(draw(words), terminal=True)
        return Tree(label, [Tree(draw(words), terminal=True)])
    kids = draw(st.lists(trees(depth=depth - 1), min_size=1, max_size=3))
    return Tree(label, kids)


@settings(max_examples=100)
@given(trees())
def test_roundtrip(tree):
    assert parse_bracketed(serialize_tree(tree)) == tree
    assert serialize_tree(parse_bracketed(serialize_tree(tree))) \
        == serialize_tree(tree)


@settings(max_examples=100)
@given(trees())
def test_yield_length_equals_leaf_count(tree):
    assert len(tree_yield(tree)) == len(tree.leaves())
    if tree.children:
        assert tree.depth() >= 1
