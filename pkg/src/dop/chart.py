"""Packed derivation forests.

Each elementary tree is read as a flat context-free rule ``root -> yield``
and recognized with dotted items over the input. Chart entries are keyed by
``(i, j, label)``; an edge records the elementary tree and the entries that
fill its open sites, so derivations of identical trees stay distinct.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .stsg import CapExceeded, CyclicGrammar, DEFAULT_CAP, Derivation, Stsg
from .treebank import Tree

__all__ = [
    "Entry", "ForestEdge", "DerivationForest", "UnknownTerminal",
    "build_forest", "unpack_forest", "count_derivations",
]

Entry = tuple  # (i, j, label)


class UnknownTerminal(ValueError):
    def __init__(self, word: str, position: int):
        self.word = word
        self.position = position
        super().__init__("unknown terminal %r at position %d"
                         % (word, position))


@dataclass(frozen=True)
class ForestEdge:
    elementary: Tree
    site_children: tuple  # one Entry per open site, left to right

    def __str__(self):
        return "%s [%s]" % (self.elementary, " ".join(
            _fmt_entry(e) for e in self.site_children))


def _fmt_entry(e: Entry) -> str:
    return "(%d,%d,%s)" % e


class DerivationForest:
    """Chart entries with their edges; only entries reachable from the goal
    are kept."""

    def __init__(self, grammar: Stsg, sentence: Sequence[str],
                 entries: dict[Entry, list[ForestEdge]]):
        self.grammar = grammar
        self.sentence = tuple(sentence)
        self.goal: Entry = (0, len(self.sentence), grammar.start)
        self.entries = entries

    def __contains__(self, entry):
        return entry in self.entries

    def edges(self, entry: Entry) -> list[ForestEdge]:
        return self.entries.get(entry, [])

    @property
    def has_parse(self) -> bool:
        return bool(self.entries.get(self.goal))

    def num_edges(self) -> int:
        return sum(len(v) for v in self.entries.values())

    def topological(self) -> list[Entry]:
        """Entries ordered children first."""
        order, seen = [], set()
        for root in sorted(self.entries, key=_entry_key):
            if root in seen:
                continue
            stack = [(root, iter(self.entries[root]), iter(()))]
            seen.add(root)
            while stack:
                entry, edges, kids = stack[-1]
                child = next(kids, None)
                if child is None:
                    edge = next(edges, None)
                    if edge is None:
                        order.append(entry)
                        stack.pop()
                    else:
                        stack[-1] = (entry, edges, iter(edge.site_children))
                    continue
                if child not in seen:
                    seen.add(child)
                    stack.append((child, iter(self.entries[child]),
                                  iter(())))
        return order

    def dump(self) -> str:
        """One line per edge: ``(i,j,label) <- tree [children]``."""
        lines = []
        for entry in sorted(self.entries, key=_entry_key):
            for edge in self.entries[entry]:
                lines.append("%s ← %s\n" % (_fmt_entry(entry), edge))
        return "".join(lines)


def _entry_key(e: Entry):
    return (e[1] - e[0], e[0], e[2])


def _yield(t: Tree) -> tuple:
    return tuple((n.label, n.terminal) for n in t.nodes() if not n.children)


def _is_subsequence(needle: Sequence[str], haystack: Sequence[str]) -> bool:
    it = iter(haystack)
    return all(any(w == h for h in it) for w in needle)


def build_forest(g: Stsg, sentence: Sequence[str]) -> DerivationForest:
    """Parse ``sentence`` into a derivation forest.

    An empty goal entry means the sentence has no derivation.
    """
    words = [str(w) for w in sentence]
    n = len(words)
    if n == 0:
        raise ValueError("empty sentence")
    for i, w in enumerate(words):
        if w not in g.terminals:
            raise UnknownTerminal(w, i)

    # rules: (tree, yield), restricted to those whose terminals occur in order
    rules = []
    for t in g.elementary_trees():
        y = _yield(t)
        if len(y) > n:
            continue
        if not _is_subsequence([s for s, term in y if term], words):
            continue
        rules.append((t, y))
    # rules indexed by their first yield symbol
    first_term = defaultdict(list)
    first_nt = defaultdict(list)
    unary = defaultdict(list)  # yield is exactly one open site
    for r, (t, y) in enumerate(rules):
        sym, term = y[0]
        if term:
            first_term[sym].append(r)
        elif len(y) == 1:
            unary[sym].append(r)
        else:
            first_nt[sym].append(r)

    entries: dict[Entry, dict] = {}
    by_span: dict[tuple, set] = defaultdict(set)   # (i, j) -> labels
    ending: dict[tuple, set] = defaultdict(set)    # (j, label) -> starts i
    # active[(i, k)][symbol] -> list of (rule, dot, children)
    active: dict[tuple, dict] = defaultdict(lambda: defaultdict(list))

    def add_edge(entry, t, children):
        edges = entries.get(entry)
        if edges is None:
            edges = entries[entry] = {}
            by_span[entry[:2]].add(entry[2])
            ending[(entry[1], entry[2])].add(entry[0])
        key = (t, children)
        if key in edges:
            return False
        edges[key] = ForestEdge(t, children)
        return True

    def advance(i, j, r, dot, children):
        t, y = rules[r]
        if dot == len(y):
            complete.append(((i, j, t.label), t, children))
            return
        if n - j < len(y) - dot:
            return
        active[(i, j)][y[dot]].append((r, dot, children))

    for width in range(1, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            complete: list = []
            # rules starting with a terminal at i, for single-word spans
            if width == 1:
                for r in first_term.get(words[i], ()):
                    advance(i, j, r, 1, ())
            # extend items over (i, k) with a terminal or a finished entry
            for k in range(i + 1, j):
                items = active.get((i, k))
                if not items:
                    continue
                if k == j - 1:
                    for r, dot, ch in items.get((words[k], True), ()):
                        advance(i, j, r, dot + 1, ch)
                for label in by_span.get((k, j), ()):
                    for r, dot, ch in items.get((label, False), ()):
                        advance(i, j, r, dot + 1, ch + ((k, j, label),))
            for entry, t, ch in complete:
                add_edge(entry, t, ch)
            # unary closure over open-site-only yields on this span
            agenda = list(by_span.get((i, j), ()))
            while agenda:
                label = agenda.pop()
                for r in unary.get(label, ()):
                    t = rules[r][0]
                    entry = (i, j, t.label)
                    fresh = entry not in entries
                    if add_edge(entry, t, ((i, j, label),)) and fresh:
                        agenda.append(t.label)
            # start multi-symbol rules whose first open site covers (i, j)
            for label in by_span.get((i, j), ()):
                for r in first_nt.get(label, ()):
                    advance(i, j, r, 1, ((i, j, label),))
            # terminal-initial rules that continue past this word
            # were started at width 1 above

    forest_entries = {e: list(edges.values()) for e, edges in entries.items()}
    forest = DerivationForest(g, words, _prune(forest_entries,
                                               (0, n, g.start)))
    _check_acyclic(forest)
    return forest


def _prune(entries, goal):
    if goal not in entries:
        return {}
    keep, stack = {goal}, [goal]
    while stack:
        for edge in entries[stack.pop()]:
            for child in edge.site_children:
                if child not in keep:
                    keep.add(child)
                    stack.append(child)
    return {e: entries[e] for e in sorted(keep, key=_entry_key)}


def _check_acyclic(forest: DerivationForest):
    WHITE, GREY, BLACK = 0, 1, 2
    color = {}
    for root in forest.entries:
        if color.get(root, WHITE) != WHITE:
            continue
        stack = [(root, iter(forest.entries[root]), iter(()))]
        color[root] = GREY
        while stack:
            entry, edges, kids = stack[-1]
            child = next(kids, None)
            if child is None:
                edge = next(edges, None)
                if edge is None:
                    color[entry] = BLACK
                    stack.pop()
                else:
                    stack[-1] = (entry, edges, iter(edge.site_children))
                continue
            c = color.get(child, WHITE)
            if c == GREY:
                raise CyclicGrammar("unary cycle through %s" % (child,))
            if c == WHITE:
                color[child] = GREY
                stack.append((child, iter(forest.entries[child]), iter(())))


def count_derivations(forest: DerivationForest) -> dict[Entry, int]:
    counts: dict[Entry, int] = {}
    for entry in forest.topological():
        total = 0
        for edge in forest.entries[entry]:
            k = 1
            for child in edge.site_children:
                k *= counts[child]
            total += k
        counts[entry] = total
    return counts


def unpack_forest(forest: DerivationForest, cap: int = DEFAULT_CAP
                  ) -> list[tuple[Derivation, Fraction]]:
    """Every derivation in the forest with its exact probability."""
    if not forest.has_parse:
        return []
    counts = count_derivations(forest)
    if counts[forest.goal] > cap:
        raise CapExceeded("%d derivations exceed cap %d"
                          % (counts[forest.goal], cap))
    probs = forest.grammar.probs
    memo: dict[Entry, list] = {}
    for entry in forest.topological():
        subs = []
        for edge in forest.entries[entry]:
            partial = [((edge.elementary,), probs[edge.elementary])]
            for child in edge.site_children:
                partial = [(steps + s, p * q) for steps, p in partial
                           for s, q in memo[child]]
            subs.extend(partial)
        memo[entry] = subs
    return memo[forest.goal]


def iter_edges(forest: DerivationForest) -> Iterable[tuple[Entry, ForestEdge]]:
    for entry, edges in forest.entries.items():
        for edge in edges:
            yield entry, edge
