"""Labelled phrase-structure trees, corpora, and the bracketed text format.

Trees are written in Penn-Treebank style bracketing::

    (S (NP John) (VP (V likes) (NP Mary)))

A bare token is a terminal leaf. A parenthesized label without children,
such as ``(NP)``, is an open substitution site (a nonterminal leaf). Both
kinds of leaf can occur in fragments; corpus trees only have terminals.
"""
from __future__ import annotations

import re
from collections import Counter
from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "Label", "Tree", "Corpus", "TreebankError", "UnbalancedParens",
    "EmptyLabel", "InternalNodeWithTerminalLabel", "RejectsOpenSites",
    "CorpusFormatError", "parse_bracketed", "serialize_tree", "tree_yield",
    "load_corpus", "read_corpus", "site",
]

_RESERVED = re.compile(r"[\s()]")
_TOKEN = re.compile(r"\(|\)|[^\s()]+")


class TreebankError(ValueError):
    """Base class for malformed tree input."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = "%s (at offset %d)" % (message, offset)
        super().__init__(message)


class UnbalancedParens(TreebankError):
    pass


class EmptyLabel(TreebankError):
    pass


class InternalNodeWithTerminalLabel(TreebankError):
    pass


class RejectsOpenSites(TreebankError):
    pass


class CorpusFormatError(TreebankError):
    """A tree error located in a corpus file; carries the 1-based line."""

    def __init__(self, lineno: int, cause: TreebankError):
        self.lineno = lineno
        self.cause = cause
        ValueError.__init__(self, "line %d: %s" % (lineno, cause))
        self.offset = cause.offset


class Label(NamedTuple):
    """A node label together with its kind."""
    text: str
    terminal: bool

    def __str__(self) -> str:
        return self.text


class Tree:
    """Immutable labelled ordered tree.

    Equality and hashing are structural, through the canonical serialization,
    so trees can be used directly as dictionary keys (fragment bags, grammars).
    """
    __slots__ = ("label", "children", "terminal", "_str", "_hash")

    def __init__(self, label: str, children: Iterable[Tree] = (),
                 terminal: bool = False):
        if not label:
            raise EmptyLabel("empty label")
        if _RESERVED.search(label):
            raise TreebankError("label %r contains whitespace or parentheses"
                                % label)
        children = tuple(children)
        if terminal and children:
            raise InternalNodeWithTerminalLabel(
                "terminal %r cannot have children" % label)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "terminal", terminal)
        if terminal:
            text = label
        elif children:
            text = "(%s %s)" % (label, " ".join(c._str for c in children))
        else:
            text = "(%s)" % label
        object.__setattr__(self, "_str", text)
        object.__setattr__(self, "_hash", hash(text))

    def __setattr__(self, name, value):
        raise AttributeError("Tree is immutable")

    def __reduce__(self):
        return (Tree, (self.label, self.children, self.terminal))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        return self._hash == other._hash and self._str == other._str

    def __hash__(self):
        return self._hash

    def __lt__(self, other: Tree) -> bool:
        return self._str < other._str

    def __str__(self):
        return self._str

    def __repr__(self):
        return "Tree(%r)" % self._str

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_site(self) -> bool:
        """True for an open substitution site (nonterminal leaf)."""
        return not self.children and not self.terminal

    @property
    def label_obj(self) -> Label:
        return Label(self.label, self.terminal)

    def depth(self) -> int:
        """Edges on the longest root-to-leaf path; 0 for a single node."""
        if not self.children:
            return 0
        return 1 + max(c.depth() for c in self.children)

    def __len__(self) -> int:
        """Number of nodes."""
        return 1 + sum(len(c) for c in self.children)

    def nodes(self) -> Iterator[Tree]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> list[Tree]:
        return [n for n in self.nodes() if not n.children]

    def words(self) -> list[str]:
        return [n.label for n in self.nodes() if n.terminal]

    def sites(self) -> list[str]:
        """Labels of the open substitution sites, left to right."""
        return [n.label for n in self.nodes() if n.is_site]

    def is_lexicalized(self) -> bool:
        return not any(n.is_site for n in self.nodes())


def site(label: str) -> Tree:
    """An open substitution site labelled ``label``."""
    return Tree(label)


def parse_bracketed(text: str) -> Tree:
    """Parse one bracketed tree (or a bare token) into a :class:`Tree`.

    >>> str(parse_bracketed("(S (NP) (VP (V likes) (NP)))"))
    '(S (NP) (VP (V likes) (NP)))'
    """
    tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(text)]
    if not tokens:
        raise EmptyLabel("empty input", 0)
    tok, off = tokens[0]
    if tok == ")":
        raise UnbalancedParens("unexpected ')'", off)
    if tok != "(":
        if len(tokens) > 1:
            raise UnbalancedParens("trailing material after bare token",
                                   tokens[1][1])
        return Tree(tok, terminal=True)

    # each frame: [label, children, offset of its '(']
    stack: list[list] = []
    result = None
    pos = 0
    while pos < len(tokens):
        tok, off = tokens[pos]
        if result is not None:
            raise UnbalancedParens("trailing material after tree", off)
        if tok == "(":
            if pos + 1 >= len(tokens):
                raise UnbalancedParens("unclosed '('", off)
            label, loff = tokens[pos + 1]
            if label in "()":
                raise EmptyLabel("'(' not followed by a label", off)
            stack.append([label, [], off])
            pos += 2
            continue
        if tok == ")":
            if not stack:
                raise UnbalancedParens("unexpected ')'", off)
            label, children, _ = stack.pop()
            node = Tree(label, children)
            if stack:
                stack[-1][1].append(node)
            else:
                result = node
        else:
            if not stack:
                raise UnbalancedParens("token outside brackets", off)
            stack[-1][1].append(Tree(tok, terminal=True))
        pos += 1
    if stack:
        raise UnbalancedParens("unclosed '('", stack[-1][2])
    return result


def serialize_tree(tree: Tree) -> str:
    """Canonical single-space bracketed form."""
    return tree._str


def tree_yield(tree: Tree) -> list[Label]:
    """Leaf labels left to right, terminals and open sites alike."""
    return [n.label_obj for n in tree.nodes() if not n.children]


class Corpus:
    """A bag of fully lexicalized trees."""

    def __init__(self, trees: Iterable[Tree] | dict[Tree, int] = ()):
        if isinstance(trees, dict):
            bag = Counter({t: int(c) for t, c in trees.items()})
        else:
            bag = Counter(trees)
        for t, c in bag.items():
            if c < 1:
                raise ValueError("multiplicity must be positive: %s" % t)
            if not t.is_lexicalized():
                raise RejectsOpenSites("corpus tree has an open site: %s" % t)
            if t.terminal or not t.children:
                raise TreebankError("corpus tree must have children: %s" % t)
        self._bag = bag
        self._order = list(bag)

    def items(self):
        return [(t, self._bag[t]) for t in self._order]

    def distinct(self) -> list[Tree]:
        return list(self._order)

    def multiplicity(self, tree: Tree) -> int:
        return self._bag.get(tree, 0)

    def __iter__(self) -> Iterator[Tree]:
        """Every tree, repeated according to its multiplicity."""
        for t in self._order:
            for _ in range(self._bag[t]):
                yield t

    def __len__(self) -> int:
        return sum(self._bag.values())

    def __eq__(self, other):
        return isinstance(other, Corpus) and self._bag == other._bag

    def start_symbol(self) -> str:
        """Most frequent root label; ties broken alphabetically."""
        roots = Counter()
        for t, c in self._bag.items():
            roots[t.label] += c
        if not roots:
            raise ValueError("empty corpus")
        return min(roots, key=lambda lab: (-roots[lab], lab))


def _is_content(line: str) -> bool:
    s = line.strip()
    return bool(s) and not s.startswith("#")


def load_corpus(lines: Iterable[str]) -> Corpus:
    """Build a corpus from bracketed lines; blanks and ``#`` lines skipped."""
    trees = []
    for lineno, line in enumerate(lines, 1):
        if not _is_content(line):
            continue
        try:
            tree = parse_bracketed(line)
        except TreebankError as err:
            raise CorpusFormatError(lineno, err) from err
        if not tree.is_lexicalized():
            raise CorpusFormatError(
                lineno, RejectsOpenSites("corpus tree has an open site"))
        if not tree.children:
            raise CorpusFormatError(
                lineno, TreebankError("corpus tree must have children"))
        trees.append(tree)
    return Corpus(trees)


def read_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return load_corpus(fh)
