"""Parse accuracy metrics and the train/test experiment harness."""
from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .chart import UnknownTerminal, build_forest
from .disambiguation import (
    NoParse, compute_inside, estimate_parse_distribution,
    exact_parse_distribution, most_probable_derivation, select_top_parses,
)
from .fragments import FragmentFilter, corpus_fragments, project_stsg
from .stsg import DEFAULT_CAP, CapExceeded, CyclicGrammar, Stsg, derive
from .treebank import Corpus, Tree

__all__ = [
    "Mode", "AccuracyReport", "SentenceResult", "LengthMismatch", "binarize",
    "brackets_of", "crosses", "score", "split_corpus", "parse_sentence",
    "evaluate_grammar", "run_experiment", "reports_to_tsv", "REPORT_COLUMNS",
    "depth_grid", "unbinarize",
]

log = logging.getLogger(__name__)

REPORT_COLUMNS = ("filter-id", "max-depth", "max-sites", "min-count", "mode",
                  "parse-acc", "sentence-acc", "bracketing-acc", "coverage",
                  "n-test", "seed")


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Mode:
    """Disambiguation mode: ``mpd``, ``mpp_mc`` or ``mpp_exact``."""
    kind: str = "mpp_mc"
    sigma: Optional[float] = None
    samples: Optional[int] = None
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.kind not in ("mpd", "mpp_mc", "mpp_exact"):
            raise ValueError("unknown mode %r" % self.kind)
        if self.kind == "mpp_mc" and (self.sigma is None) == (self.samples
                                                              is None):
            raise ValueError("mpp_mc needs exactly one of sigma or samples")

    def __str__(self):
        if self.kind == "mpp_mc":
            if self.samples is not None:
                return "mpp_mc(N=%d)" % self.samples
            return "mpp_mc(sigma=%g)" % self.sigma
        if self.kind == "mpp_exact":
            return "mpp_exact(cap=%d)" % self.cap
        return "mpd"


def binarize(tree: Tree) -> Tree:
    """Right-fold nodes with more than two children.

    ``(X a b c)`` becomes ``(X a (X| b c))``; auxiliary labels end in ``|``
    so the transformation can be undone and is idempotent.
    """
    if not tree.children:
        return tree
    kids = [binarize(c) for c in tree.children]
    if len(kids) <= 2:
        return Tree(tree.label, kids)
    aux = tree.label if tree.label.endswith("|") else tree.label + "|"
    right = Tree(aux, kids[-2:])
    for kid in reversed(kids[1:-2]):
        right = Tree(aux, [kid, right])
    return Tree(tree.label, [kids[0], right])


def unbinarize(tree: Tree) -> Tree:
    if not tree.children:
        return tree
    kids = []
    for c in tree.children:
        c = unbinarize(c)
        if c.label.endswith("|") and c.children and not c.terminal:
            kids.extend(c.children)
        else:
            kids.append(c)
    return Tree(tree.label, kids)


def brackets_of(tree: Tree, include_root: bool = True) -> set[tuple[int, int]]:
    """Spans of internal nodes covering at least two leaves."""
    spans = set()

    def walk(node, start):
        if not node.children:
            return start + 1
        end = start
        for c in node.children:
            end = walk(c, end)
        if end - start >= 2:
            spans.add((start, end))
        return end

    n = walk(tree, 0)
    if not include_root:
        spans.discard((0, n))
    return spans


def crosses(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Strict overlap without nesting."""
    i, j = a
    k, l = b
    return i < k < j < l or k < i < l < j


@dataclass
class SentenceResult:
    index: int
    sentence: tuple
    candidate: Optional[Tree]
    gold: Tree
    status: str = "ok"
    exact_match: bool = False
    brackets: int = 0
    crossing: int = 0
    seconds: float = 0.0


@dataclass
class AccuracyReport:
    parse_accuracy: float
    sentence_accuracy: float
    bracketing_accuracy: float
    coverage: float
    rows: list = field(default_factory=list, repr=False)
    filter: Optional[FragmentFilter] = None
    mode: Optional[Mode] = None
    seed: object = None

    @property
    def n_test(self) -> int:
        return len(self.rows)

    def as_row(self) -> tuple:
        f = self.filter or FragmentFilter()
        return (f.ident(),
                "inf" if f.max_depth is None else str(f.max_depth),
                "inf" if f.max_substitution_sites is None
                else str(f.max_substitution_sites),
                str(f.min_count), str(self.mode),
                "%.2f" % self.parse_accuracy,
                "%.2f" % self.sentence_accuracy,
                "%.2f" % self.bracketing_accuracy,
                "%.2f" % self.coverage, str(self.n_test), str(self.seed))


def reports_to_tsv(reports: Sequence[AccuracyReport]) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    lines.extend("\t".join(r.as_row()) for r in reports)
    return "\n".join(lines) + "\n"


def _pct(num, den) -> float:
    return 100.0 * num / den if den else 0.0


def score(candidates: Sequence[Optional[Tree]], golds: Sequence[Tree],
          include_root: bool = True, statuses: Optional[Sequence[str]] = None
          ) -> AccuracyReport:
    """Parse, sentence and bracketing accuracy plus coverage.

    Missing candidates count as failures on every metric; for bracketing
    accuracy each of the gold tree's brackets is counted as a crossing one.
    """
    if len(candidates) != len(golds):
        raise LengthMismatch("%d candidates vs %d golds"
                             % (len(candidates), len(golds)))
    rows = []
    exact = sentence_ok = covered = 0
    total_brackets = good_brackets = 0
    for i, (cand, gold) in enumerate(zip(candidates, golds)):
        gold_br = brackets_of(binarize(gold), include_root)
        row = SentenceResult(i, tuple(gold.words()), cand, gold)
        if statuses is not None:
            row.status = statuses[i]
        if cand is None:
            if row.status == "ok":
                row.status = "no-parse"
            row.brackets = row.crossing = len(gold_br)
        else:
            covered += 1
            row.exact_match = cand == gold
            cand_br = brackets_of(binarize(cand), include_root)
            row.brackets = len(cand_br)
            row.crossing = sum(1 for a in cand_br
                               if any(crosses(a, b) for b in gold_br))
            exact += row.exact_match
            sentence_ok += row.crossing == 0
        total_brackets += row.brackets
        good_brackets += row.brackets - row.crossing
        rows.append(row)
    n = len(golds)
    return AccuracyReport(_pct(exact, n), _pct(sentence_ok, n),
                          _pct(good_brackets, total_brackets),
                          _pct(covered, n), rows)


def split_corpus(corpus: Corpus, train_fraction: float, seed: int
                 ) -> tuple[list[Tree], list[Tree]]:
    """Random train/test split over corpus tokens (multiplicity expanded)."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    trees = list(corpus)
    order = list(range(len(trees)))
    random.Random(seed).shuffle(order)
    cut = int(round(train_fraction * len(trees)))
    cut = min(max(cut, 1), len(trees) - 1)
    if len(trees) < 2:
        raise ValueError("corpus too small to split")
    train = [trees[k] for k in order[:cut]]
    test = [trees[k] for k in order[cut:]]
    return train, test


def parse_sentence(grammar: Stsg, words: Sequence[str], mode: Mode, seed,
                   tie_width: float = 0.0):
    """Parse and disambiguate one sentence.

    Returns ``(status, parses, values, n)``: ``parses`` is the ordered list
    of selected trees (empty on failure); ``values`` holds, per parse, the
    derivation probability for ``mpd`` and the parse probability given the
    sentence for the other modes; ``n`` is the sample count for ``mpp_mc``.
    """
    try:
        forest = build_forest(grammar, words)
    except UnknownTerminal as err:
        return ("unknown-terminal %s@%d" % (err.word, err.position), [], [],
                None)
    except CyclicGrammar:
        return "cyclic-grammar", [], [], None
    if not forest.has_parse:
        return "no-derivation", [], [], None
    if mode.kind == "mpd":
        steps, p = most_probable_derivation(forest)
        return "ok", [derive(steps)], [p], None
    if mode.kind == "mpp_exact":
        try:
            probs = exact_parse_distribution(forest, mode.cap)
        except CapExceeded:
            return "cap-exceeded", [], [], None
        total = sum(probs.values())
        cond = {t: p / total for t, p in probs.items()}
        top = select_top_parses(cond, tie_width)
        return "ok", top, [cond[t] for t in top], None
    masses = compute_inside(forest)
    dist = estimate_parse_distribution(forest, masses, sigma=mode.sigma,
                                       n=mode.samples, seed=seed)
    top = select_top_parses(dist, tie_width)
    return "ok", top, [dist.estimate(t) for t in top], dist.n


def _sentence_job(args):
    grammar, words, mode, seed = args
    t0 = time.perf_counter()
    try:
        status, parses, _, _ = parse_sentence(grammar, words, mode, seed)
    except NoParse:
        status, parses = "no-derivation", []
    return status, (parses[0] if parses else None), time.perf_counter() - t0


def evaluate_grammar(grammar: Stsg, test: Sequence[Tree], mode: Mode,
                     rng_seed: int = 0, jobs: int = 1,
                     include_root: bool = True) -> AccuracyReport:
    """Parse the yield of every test tree and score against it.

    Each sentence gets its own seed spawned from ``rng_seed`` so results do
    not depend on ``jobs``.
    """
    seeds = np.random.SeedSequence(rng_seed).spawn(len(test))
    tasks = [(grammar, tuple(t.words()), mode, s) for t, s in zip(test, seeds)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sentence_job, tasks, chunksize=4))
    else:
        results = [_sentence_job(t) for t in tasks]
    cands = [r[1] for r in results]
    statuses = [r[0] for r in results]
    report = score(cands, test, include_root, statuses)
    for row, r in zip(report.rows, results):
        row.seconds = r[2]
    report.mode = mode
    report.seed = rng_seed
    return report


def run_experiment(corpus: Corpus | Sequence[Tree], train_fraction: float = 5 / 6,
                   split_seed: int = 0,
                   filter_grid: Sequence[FragmentFilter] = (FragmentFilter(),),
                   mode: Mode = Mode("mpp_mc", samples=100),
                   rng_seed: int = 0, jobs: int = 1,
                   include_root: bool = True) -> list[AccuracyReport]:
    """One report per filter: extract from the training split, project,
    parse the test yields and score them."""
    if not isinstance(corpus, Corpus):
        corpus = Corpus(corpus)
    train, test = split_corpus(corpus, train_fraction, split_seed)
    train_corpus = Corpus(train)
    start = corpus.start_symbol()
    reports = []
    for filt in filter_grid:
        t0 = time.perf_counter()
        bag = corpus_fragments(train_corpus, filt, start)
        grammar = project_stsg(bag, start)
        report = evaluate_grammar(grammar, test, mode, rng_seed, jobs,
                                  include_root)
        report.filter = filt
        log.info("%s %s: %d fragments, %.1fs", filt.ident(), mode, len(bag),
                 time.perf_counter() - t0)
        reports.append(report)
    return reports


def depth_grid(depths=(1, 2, 3, 4, 5, 6, None), **kwargs
               ) -> list[FragmentFilter]:
    """Filters varying the maximum fragment depth; other fields shared."""
    base = FragmentFilter(**kwargs)
    return [replace(base, max_depth=d) for d in depths]
