"""A small generative treebank for desk-scale experiments.

Trees are sampled from a fixed PCFG over part-of-speech tags (the tags are
the leaves), with PP attachment and coordination ambiguity so that
disambiguation is not trivial.
"""
from __future__ import annotations

import random
from importlib import resources

from .treebank import Corpus, Tree, load_corpus

__all__ = ["PCFG_RULES", "generate_tree", "generate_corpus",
           "bundled_corpus", "BUNDLED_SEED", "BUNDLED_SIZE"]

BUNDLED_SEED = 1996
BUNDLED_SIZE = 200

# lhs -> [(rhs, weight)]; symbols with rules are nonterminals. A suffix
# after "@" distinguishes attachment contexts and is dropped from the label,
# so the preposition, not the PP label, signals where a PP attaches.
PCFG_RULES = {
    "S": [(("NP", "VP"), 8), (("VP",), 1)],
    "NP": [(("DT", "NN"), 30), (("PRP",), 12), (("NNP",), 12),
           (("DT", "JJ", "NN"), 10), (("NP", "PP@N"), 14), (("NN",), 8),
           (("NP", "CC", "NP"), 3)],
    "VP": [(("VB", "NP"), 30), (("VB", "NP", "PP@V"), 18), (("VB",), 6),
           (("VB", "PP@V"), 12), (("MD", "VP"), 10), (("VP", "CC", "VP"), 2),
           (("VB", "NP", "NP"), 5)],
    "PP@N": [(("OF", "NP"), 6), (("IN", "NP"), 2), (("WITH", "NP"), 1)],
    "PP@V": [(("WITH", "NP"), 4), (("TO", "NP"), 5), (("IN", "NP"), 3)],
}


def generate_tree(rng: random.Random, symbol: str = "S",
                  depth: int = 0, max_depth: int = 8) -> Tree:
    rules = PCFG_RULES[symbol]
    if depth >= max_depth:
        # fall back to the shortest non-recursive expansion
        rules = [min(rules, key=lambda r: (any(s in PCFG_RULES
                                               for s in r[0]), len(r[0])))]
    rhs = rng.choices([r for r, _ in rules], [w for _, w in rules])[0]
    kids = [generate_tree(rng, s, depth + 1, max_depth) if s in PCFG_RULES
            else Tree(s, terminal=True) for s in rhs]
    return Tree(symbol.partition("@")[0], kids)


def generate_corpus(n: int, seed: int, min_len: int = 2, max_len: int = 9
                    ) -> list[Tree]:
    """``n`` trees with yield length in ``[min_len, max_len]``."""
    rng = random.Random(seed)
    trees = []
    while len(trees) < n:
        t = generate_tree(rng)
        if min_len <= len(t.words()) <= max_len:
            trees.append(t)
    return trees


def bundled_corpus() -> Corpus:
    """The shipped 200-tree corpus (``generate_corpus(200, 1996)``)."""
    text = resources.files("dop.data").joinpath("synthetic200.mrg") \
        .read_text(encoding="utf-8")
    return load_corpus(text.splitlines())
