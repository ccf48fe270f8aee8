"""Subtree (fragment) extraction and relative-frequency projection.

A fragment rooted at an internal node keeps that node's full daughter
sequence; every internal daughter is either cut (becoming an open site) or
expanded recursively. The bag of fragments counts each fragment as often as
it can be identified in the corpus.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .treebank import Corpus, Tree, parse_bracketed, site

__all__ = [
    "FragmentFilter", "FragmentBag", "EmptyBagAfterFiltering",
    "NoStartFragments", "extract_subtrees", "corpus_fragments",
    "project_stsg", "fragment_depth", "substitution_sites",
]


class EmptyBagAfterFiltering(ValueError):
    pass


class NoStartFragments(ValueError):
    pass


@dataclass(frozen=True)
class FragmentFilter:
    """Restrictions on the extracted fragments.

    ``None`` means unbounded for ``max_depth`` and ``max_substitution_sites``.
    ``min_count=2`` drops hapaxes; with ``hapax_min_depth`` set, only the
    rare fragments deeper than that depth are dropped.
    """
    max_depth: Optional[int] = None
    max_substitution_sites: Optional[int] = None
    root_whitelist: Optional[frozenset] = None
    min_count: int = 1
    hapax_min_depth: Optional[int] = None

    def __post_init__(self):
        for name in ("max_depth", "max_substitution_sites", "hapax_min_depth"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError("%s must be >= 1, got %r" % (name, value))
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.root_whitelist is not None:
            object.__setattr__(self, "root_whitelist",
                               frozenset(self.root_whitelist))

    def ident(self) -> str:
        """Short identifier used in reports."""
        parts = ["d%s" % ("inf" if self.max_depth is None else self.max_depth)]
        if self.max_substitution_sites is not None:
            parts.append("s%d" % self.max_substitution_sites)
        if self.root_whitelist is not None:
            parts.append("r" + "+".join(sorted(self.root_whitelist)))
        if self.min_count > 1:
            parts.append("c%d" % self.min_count)
        if self.hapax_min_depth is not None:
            parts.append("h%d" % self.hapax_min_depth)
        return "-".join(parts)


def fragment_depth(frag: Tree) -> int:
    return frag.depth()


def substitution_sites(frag: Tree) -> int:
    return sum(1 for n in frag.nodes() if n.is_site)


class FragmentBag:
    """Fragment occurrence counts with per-root totals."""

    def __init__(self, counts: dict[Tree, int] | Counter):
        self.counts = {t: int(c) for t, c in counts.items() if c > 0}
        totals = Counter()
        for t, c in self.counts.items():
            totals[t.label] += c
        self.root_totals = dict(totals)

    def __len__(self):
        return len(self.counts)

    def __contains__(self, frag):
        return frag in self.counts

    def __getitem__(self, frag) -> int:
        return self.counts.get(frag, 0)

    def __eq__(self, other):
        return isinstance(other, FragmentBag) and self.counts == other.counts

    def total(self) -> int:
        return sum(self.counts.values())

    def by_root(self, label: str) -> dict[Tree, int]:
        return {t: c for t, c in self.counts.items() if t.label == label}

    def merge(self, other: FragmentBag) -> FragmentBag:
        merged = Counter(self.counts)
        merged.update(other.counts)
        return FragmentBag(merged)

    def to_tsv(self) -> str:
        lines = ["%s\t%d\n" % (str(t), c) for t, c in
                 sorted(self.counts.items(), key=lambda kv: str(kv[0]))]
        return "".join(lines)

    @classmethod
    def from_tsv(cls, lines: Iterable[str]) -> FragmentBag:
        counts = Counter()
        for line in lines:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            tree, count = line.split("\t")[:2]
            counts[parse_bracketed(tree)] += int(count)
        return cls(counts)


class _Extractor:
    """Memoized generation of fragments rooted at each node of one tree.

    Fragments are yielded as (tree, depth, sites). The depth and site caps
    are applied while generating, which gives the same bag as filtering
    afterwards but avoids building fragments that would be discarded.
    """

    def __init__(self, max_depth: Optional[int], max_sites: Optional[int]):
        self.max_depth = max_depth
        self.max_sites = max_sites
        self.memo: dict[tuple[Tree, Optional[int]], list] = {}

    def rooted(self, node: Tree, budget: Optional[int]) -> list:
        key = (node, budget)
        got = self.memo.get(key)
        if got is not None:
            return got
        options = []
        child_budget = None if budget is None else budget - 1
        for child in node.children:
            if child.terminal or not child.children:
                options.append([(child, 0, 1 if child.is_site else 0)])
                continue
            opts = [(site(child.label), 0, 1)]
            if child_budget is None or child_budget >= 1:
                opts.extend(self.rooted(child, child_budget))
            options.append(opts)
        result = []
        cap = self.max_sites

        def combine(i, picked, depth, nsites):
            if i == len(options):
                result.append((Tree(node.label, picked), depth + 1, nsites))
                return
            for frag, d, s in options[i]:
                total = nsites + s
                if cap is not None and total > cap:
                    continue
                combine(i + 1, picked + [frag], max(depth, d), total)

        combine(0, [], 0, 0)
        self.memo[key] = result
        return result


def _internal_nodes(tree: Tree):
    return [n for n in tree.nodes() if n.children]


def extract_subtrees(tree: Tree, max_depth: Optional[int] = None,
                     max_substitution_sites: Optional[int] = None,
                     roots: Optional[frozenset] = None) -> FragmentBag:
    """All fragments of one tree, with positional occurrence counts.

    >>> bag = extract_subtrees(parse_bracketed("(NP Mary)"))
    >>> bag.counts
    {Tree('(NP Mary)'): 1}
    """
    return _extract(_Extractor(max_depth, max_substitution_sites), tree,
                    max_depth, roots)


def _extract(ex, tree, max_depth, roots) -> FragmentBag:
    counts = Counter()
    for node in _internal_nodes(tree):
        if roots is not None and node.label not in roots:
            continue
        for frag, _, _ in ex.rooted(node, max_depth):
            counts[frag] += 1
    return FragmentBag(counts)


def count_rooted_subtrees(node: Tree) -> int:
    """Number of fragments rooted at ``node``: product of (1 + f(child))."""
    if not node.children:
        return 0
    return math.prod(1 if not c.children else 1 + count_rooted_subtrees(c)
                     for c in node.children)


def corpus_fragments(corpus: Corpus, filt: FragmentFilter = FragmentFilter(),
                     start: Optional[str] = None) -> FragmentBag:
    """The filtered bag of fragments of a corpus.

    Filters apply in order: depth cap, substitution-site cap, root
    whitelist, then the hapax rule on corpus-wide counts.
    """
    if start is None:
        start = corpus.start_symbol()
    ex = _Extractor(filt.max_depth, filt.max_substitution_sites)
    counts = Counter()
    for tree, mult in corpus.items():
        bag = _extract(ex, tree, filt.max_depth, filt.root_whitelist)
        for frag, c in bag.counts.items():
            counts[frag] += c * mult
    if filt.min_count > 1:
        for frag in [f for f, c in counts.items() if c < filt.min_count]:
            if filt.hapax_min_depth is None or \
                    frag.depth() > filt.hapax_min_depth:
                del counts[frag]
    bag = FragmentBag(counts)
    if not bag.root_totals.get(start):
        raise EmptyBagAfterFiltering(
            "no fragment rooted %r survives filter %s" % (start, filt.ident()))
    return bag


def project_stsg(bag: FragmentBag, start: str):
    """Relative-frequency STSG: P(t) = #(t) / #(fragments with root(t))."""
    from .stsg import Stsg
    if not bag.counts:
        raise NoStartFragments("empty fragment bag")
    if not bag.root_totals.get(start):
        raise NoStartFragments("no fragment rooted %r" % start)
    probs = {t: Fraction(c, bag.root_totals[t.label])
             for t, c in bag.counts.items()}
    return Stsg(start, probs, counts=dict(bag.counts))
