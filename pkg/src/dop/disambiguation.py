"""Choosing analyses from a derivation forest.

Viterbi gives the most probable derivation. The most probable parse sums
over derivations and has no polynomial exact algorithm, so it is estimated
by sampling derivations in proportion to their probability and counting the
parses they produce.
"""
from __future__ import annotations

import bisect
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .chart import DerivationForest, Entry, count_derivations
from .stsg import DEFAULT_CAP, CapExceeded, Derivation, derive
from .treebank import Tree

__all__ = [
    "NoParse", "InsideMasses", "ParseDistribution", "compute_inside",
    "most_probable_derivation", "sample_derivation", "DerivationSampler",
    "samples_for_sigma", "estimate_parse_distribution",
    "exact_parse_distribution", "select_top_parses", "mc_error_bound",
    "make_rng",
]


class NoParse(ValueError):
    pass


def make_rng(seed) -> np.random.Generator:
    """A PCG64 generator; accepts a seed, SeedSequence, or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("a seed is required")
    return np.random.default_rng(seed)


def _logsumexp(values: Sequence[float]) -> float:
    m = max(values)
    if m == -math.inf:
        return m
    return m + math.log(sum(math.exp(v - m) for v in values))


@dataclass
class InsideMasses:
    """Per-entry sum of the probabilities of all subderivations.

    With ``exact`` the values are Fractions; otherwise natural logs.
    """
    values: dict
    exact: bool
    goal: Entry

    def mass(self, entry: Entry):
        if self.exact:
            return self.values.get(entry, Fraction(0))
        v = self.values.get(entry)
        return 0.0 if v is None else math.exp(v)

    def log_mass(self, entry: Entry) -> float:
        v = self.values.get(entry)
        if v is None:
            return -math.inf
        if self.exact:
            return math.log(v) if v > 0 else -math.inf
        return v

    @property
    def sentence_probability(self):
        return self.mass(self.goal)


def compute_inside(forest: DerivationForest, exact: bool = False
                   ) -> InsideMasses:
    g = forest.grammar
    values = {}
    for entry in forest.topological():
        if exact:
            total = Fraction(0)
            for edge in forest.entries[entry]:
                term = g.probs[edge.elementary]
                for child in edge.site_children:
                    term *= values[child]
                total += term
            values[entry] = total
        else:
            terms = []
            for edge in forest.entries[entry]:
                lp = g.logprob(edge.elementary)
                for child in edge.site_children:
                    lp += values[child]
                terms.append(lp)
            values[entry] = _logsumexp(terms)
    return InsideMasses(values, exact, forest.goal)


def _expand(forest: DerivationForest, choice: dict[Entry, object]
            ) -> Derivation:
    """Leftmost (pre-order) step sequence from a per-entry edge choice."""
    steps = []
    stack = [forest.goal]
    while stack:
        edge = choice[stack.pop()]
        steps.append(edge.elementary)
        stack.extend(reversed(edge.site_children))
    return tuple(steps)


def _serial(forest, choice, entry, memo) -> tuple:
    got = memo.get(entry)
    if got is None:
        edge = choice[entry]
        got = (str(edge.elementary),)
        for child in edge.site_children:
            got += _serial(forest, choice, child, memo)
        memo[entry] = got
    return got


def most_probable_derivation(forest: DerivationForest, exact: bool = False
                             ) -> tuple[Derivation, Fraction]:
    """Viterbi over the forest.

    Ties on probability are broken by the lexicographically smallest
    sequence of serialized elementary trees, which is well defined locally
    because complete subderivations are never prefixes of one another.
    Returns the derivation and its exact probability.
    """
    if not forest.has_parse:
        raise NoParse("no derivation for %r" % " ".join(forest.sentence))
    g = forest.grammar
    best: dict[Entry, object] = {}
    score: dict[Entry, object] = {}
    serial_memo: dict[Entry, tuple] = {}
    for entry in forest.topological():
        top_score, top_edge, top_serial = None, None, None
        for edge in forest.entries[entry]:
            if exact:
                s = g.probs[edge.elementary]
                for child in edge.site_children:
                    s *= score[child]
            else:
                s = g.logprob(edge.elementary)
                for child in edge.site_children:
                    s += score[child]
            if top_edge is not None and s < top_score:
                continue
            ser = (str(edge.elementary),)
            for child in edge.site_children:
                ser += _serial(forest, best, child, serial_memo)
            if top_edge is None or s > top_score or ser < top_serial:
                top_score, top_edge, top_serial = s, edge, ser
        best[entry] = top_edge
        score[entry] = top_score
        serial_memo[entry] = top_serial
    steps = _expand(forest, best)
    prob = Fraction(1)
    for t in steps:
        prob *= g.probs[t]
    return steps, prob


class DerivationSampler:
    """Draws derivations with probability P(d) / P(sentence).

    At each entry an edge is chosen with probability proportional to
    P(edge tree) times the inside masses of its children, top-down from the
    goal. ``method="bottomup"`` instead fixes one random subderivation per
    entry in bottom-up order and weighs edges by the probabilities of the
    subderivations already fixed below them; this literal elimination scheme
    is kept for replication and is not proportional in general.
    """

    def __init__(self, forest: DerivationForest,
                 masses: Optional[InsideMasses] = None,
                 method: str = "topdown"):
        if not forest.has_parse:
            raise NoParse("no derivation for %r" % " ".join(forest.sentence))
        if method not in ("topdown", "bottomup"):
            raise ValueError("unknown sampling method %r" % method)
        self.forest = forest
        self.method = method
        self.order = forest.topological()
        g = forest.grammar
        if masses is None:
            masses = compute_inside(forest)
        self.masses = masses
        self.tables: dict[Entry, tuple[list, list]] = {}
        for entry in self.order:
            edges = forest.entries[entry]
            if method == "topdown":
                logw = [g.logprob(e.elementary)
                        + sum(masses.log_mass(c) for c in e.site_children)
                        for e in edges]
                self.tables[entry] = (edges, _cumulative(logw))
            else:
                self.tables[entry] = (edges, None)

    def sample(self, rng: np.random.Generator) -> Derivation:
        if self.method == "bottomup":
            return self._sample_bottomup(rng)
        steps = []
        stack = [self.forest.goal]
        while stack:
            edges, cum = self.tables[stack.pop()]
            k = bisect.bisect_right(cum, rng.random() * cum[-1])
            edge = edges[min(k, len(edges) - 1)]
            steps.append(edge.elementary)
            stack.extend(reversed(edge.site_children))
        return tuple(steps)

    def _sample_bottomup(self, rng) -> Derivation:
        g = self.forest.grammar
        chosen, logp = {}, {}
        for entry in self.order:
            edges = self.tables[entry][0]
            logw = [g.logprob(e.elementary)
                    + sum(logp[c] for c in e.site_children) for e in edges]
            cum = _cumulative(logw)
            k = min(bisect.bisect_right(cum, rng.random() * cum[-1]),
                    len(edges) - 1)
            chosen[entry] = edges[k]
            logp[entry] = logw[k]
        return _expand(self.forest, chosen)


def _cumulative(logw: list[float]) -> list[float]:
    m = max(logw)
    acc, out = 0.0, []
    for lw in logw:
        acc += math.exp(lw - m)
        out.append(acc)
    return out


def sample_derivation(forest: DerivationForest, masses: InsideMasses,
                      rng) -> Derivation:
    """One derivation drawn in proportion to its probability."""
    return DerivationSampler(forest, masses).sample(make_rng(rng))


def samples_for_sigma(sigma: float) -> int:
    """Sample count whose worst-case standard error 1/(2 sqrt N) is <= sigma.

    Computed exactly on the decimal value of ``sigma``: N = ceil(1/(4 s^2)).
    """
    if not 0 < sigma <= 0.5:
        raise ValueError("sigma must lie in (0, 0.5]")
    s = Fraction(repr(float(sigma)))
    return max(1, math.ceil(1 / (4 * s * s)))


@dataclass
class ParseDistribution:
    counts: Counter
    n: int
    seed: object = None
    derivation_counts: Optional[Counter] = field(default=None, repr=False)

    @property
    def sigma_bound(self) -> float:
        return 1 / (2 * math.sqrt(self.n))

    def estimate(self, parse: Tree) -> float:
        return self.counts.get(parse, 0) / self.n

    def estimates(self) -> dict[Tree, float]:
        return {t: c / self.n for t, c in self.counts.items()}

    def ranked(self) -> list[tuple[Tree, float]]:
        return sorted(self.estimates().items(),
                      key=lambda kv: (-kv[1], str(kv[0])))

    def to_tsv(self) -> str:
        out = ["#N=%d\tseed=%s\tsigma_bound=%.6g\n"
               % (self.n, self.seed, self.sigma_bound)]
        for tree, p in self.ranked():
            out.append("%s\t%d\t%.6g\n" % (tree, self.counts[tree], p))
        return "".join(out)


def estimate_parse_distribution(forest: DerivationForest,
                                masses: Optional[InsideMasses] = None, *,
                                sigma: Optional[float] = None,
                                n: Optional[int] = None, seed=None,
                                method: str = "topdown",
                                keep_derivations: bool = False
                                ) -> ParseDistribution:
    """Monte Carlo estimate of the parse distribution of one sentence.

    Give exactly one of ``sigma`` (target standard error) or ``n``.
    """
    if (sigma is None) == (n is None):
        raise ValueError("give exactly one of sigma or n")
    if sigma is not None:
        n = samples_for_sigma(sigma)
    if n < 1:
        raise ValueError("n must be positive")
    sampler = DerivationSampler(forest, masses, method=method)
    rng = make_rng(seed)
    counts = Counter()
    dcounts = Counter() if keep_derivations else None
    parses: dict[Derivation, Tree] = {}
    for _ in range(n):
        d = sampler.sample(rng)
        tree = parses.get(d)
        if tree is None:
            tree = parses[d] = derive(d)
        counts[tree] += 1
        if dcounts is not None:
            dcounts[d] += 1
    return ParseDistribution(counts, n, seed, dcounts)


def exact_parse_distribution(forest: DerivationForest, cap: int = DEFAULT_CAP
                             ) -> dict[Tree, Fraction]:
    """Exact P(parse) for every parse.

    Works bottom-up over the forest with one tree -> probability map per
    entry, so derivations of the same subtree are merged as soon as they
    meet. ``cap`` still bounds the number of derivations.
    """
    if not forest.has_parse:
        return {}
    counts = count_derivations(forest)
    if counts[forest.goal] > cap:
        raise CapExceeded("%d derivations exceed cap %d"
                          % (counts[forest.goal], cap))
    probs = forest.grammar.probs
    memo: dict = {}
    for entry in forest.topological():
        out: dict[Tree, Fraction] = defaultdict(Fraction)
        for edge in forest.entries[entry]:
            partial = [((), probs[edge.elementary])]
            for child in edge.site_children:
                partial = [(fill + (t,), p * q) for fill, p in partial
                           for t, q in memo[child].items()]
            for fill, p in partial:
                out[_substitute(edge.elementary, iter(fill))] += p
        memo[entry] = out
    return dict(memo[forest.goal])


def _substitute(tree: Tree, fill) -> Tree:
    """Replace the open sites of ``tree``, left to right, by ``fill``."""
    if tree.is_site:
        return next(fill)
    if not tree.children:
        return tree
    return Tree(tree.label, [_substitute(c, fill) for c in tree.children])


def select_top_parses(dist, tie_width: float = 0.0) -> list[Tree]:
    """Parses whose estimate lies within ``tie_width`` of the best one.

    ``dist`` is a ParseDistribution or a mapping from parse to probability.
    Ordered by estimate (descending), then serialization.
    """
    if tie_width < 0:
        raise ValueError("tie_width must be >= 0")
    est = dist.estimates() if isinstance(dist, ParseDistribution) \
        else dict(dist)
    if not est:
        return []
    top = max(est.values())
    if isinstance(top, Fraction):
        tie_width = Fraction(tie_width)
    keep = [t for t, p in est.items() if p >= top - tie_width]
    return sorted(keep, key=lambda t: (-est[t], str(t)))


def mc_error_bound(p: Sequence[float], n: int) -> float:
    """Upper bound on the chance that the most frequently sampled parse is
    not the most probable one, after ``n`` samples. ``p[0]`` is the most
    probable parse; the value is not clamped to 1."""
    if not p:
        raise ValueError("need at least one probability")
    r0 = math.sqrt(p[0])
    return sum((1 - (r0 - math.sqrt(q)) ** 2) ** n for q in p[1:])
