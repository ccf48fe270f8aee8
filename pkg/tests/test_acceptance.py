"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line that is printed in the
"acceptance criteria" section at the end of the pytest run.
"""
import io
import math
import random
import time
from collections import Counter
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import TOY_LINES, T
from dop.chart import build_forest, count_derivations, unpack_forest
from dop.cli import main
from dop.disambiguation import (
    DerivationSampler, compute_inside, exact_parse_distribution,
    mc_error_bound, most_probable_derivation, samples_for_sigma,
    select_top_parses,
)
from dop.evaluation import brackets_of, score
from dop.fragments import FragmentFilter, corpus_fragments, project_stsg
from dop.stsg import derivation_probability, derive, enumerate_derivations
from dop.treebank import load_corpus
from randgrammar import random_corpus_tree, random_grammar, random_sentences
from test_chart import abcd_grammar
from test_disambiguation import WITNESS

MLS = "Mary likes Susan".split()
SUITE_SEEDS = range(200)


class _Check:
    def __init__(self):
        self.detail = ""


@contextmanager
def criterion(acceptance, number, title):
    check = _Check()
    t0 = time.perf_counter()
    try:
        yield check
    except BaseException as err:
        acceptance("[FAIL] %d. %s: %s" % (number, title,
                                          str(err).splitlines()[0]
                                          if str(err) else type(err).__name__))
        raise
    acceptance("[PASS] %d. %s (%.2f s)%s" % (
        number, title, time.perf_counter() - t0,
        "; " + check.detail if check.detail else ""))


def best_time(fn, repeat=20):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_c01_toy_fragment_counts(acceptance):
    with criterion(acceptance, 1, "toy root totals S=20 NP=4 VP=8 V=2") as c:
        corpus = load_corpus(TOY_LINES)
        totals = corpus_fragments(corpus).root_totals
        assert dict(totals) == {"S": 20, "NP": 4, "VP": 8, "V": 2}
        elapsed = best_time(lambda: corpus_fragments(corpus).root_totals)
        assert elapsed < 1e-3, "%.3f ms" % (elapsed * 1e3)
        c.detail = "%.3f ms" % (elapsed * 1e3)


def test_c02_derivation_probabilities(acceptance, toy_grammar):
    with criterion(acceptance, 2, "derivations 1/320, 1/160, 1/1280") as c:
        steps = [
            (T("(S (NP) (VP (V likes) (NP)))"), T("(NP Mary)"),
             T("(NP Susan)")),
            (T("(S (NP) (VP (V) (NP Susan)))"), T("(NP Mary)"),
             T("(V likes)")),
            (T("(S (NP) (VP))"), T("(NP Mary)"), T("(VP (V likes) (NP))"),
             T("(NP Susan)")),
        ]
        expected = [Fraction(1, 320), Fraction(1, 160), Fraction(1, 1280)]

        def run():
            return [derivation_probability(toy_grammar, s) for s in steps]

        assert run() == expected
        elapsed = best_time(run)
        assert elapsed < 1e-3, "%.3f ms" % (elapsed * 1e3)
        c.detail = "%.3f ms" % (elapsed * 1e3)


def _suite():
    for seed in SUITE_SEEDS:
        g = random_grammar(seed)
        for sent in random_sentences(g, seed):
            yield seed, g, list(sent)


def test_c03_forest_oracle_equivalence(acceptance):
    with criterion(acceptance, 3, "forest = oracle on 200 random grammars") \
            as c:
        t0 = time.perf_counter()
        sentences = parsed = derivations = 0
        for seed, g, sent in _suite():
            assert len(g.probs) <= 8 and len(sent) <= 6
            oracle = Counter(enumerate_derivations(g, sent))
            if set(sent) <= g.terminals:
                forest = Counter(unpack_forest(build_forest(g, sent)))
            else:
                forest = Counter()
            assert forest == oracle, "seed %d, %s" % (seed, sent)
            sentences += 1
            parsed += bool(oracle)
            derivations += sum(oracle.values())
        elapsed = time.perf_counter() - t0
        assert elapsed < 30, "%.1f s" % elapsed
        c.detail = "%d sentences, %d parsed, %d derivations" % (
            sentences, parsed, derivations)


def test_c04_viterbi(acceptance):
    with criterion(acceptance, 4, "Viterbi = oracle max, deterministic") as c:
        checked = 0
        for seed, g, sent in _suite():
            ds = enumerate_derivations(g, sent)
            if not ds:
                continue
            best = max(p for _, p in ds)
            first = most_probable_derivation(build_forest(g, sent), exact=True)
            second = most_probable_derivation(build_forest(g, sent),
                                              exact=True)
            assert first[1] == best, "seed %d, %s" % (seed, sent)
            assert first == second
            assert most_probable_derivation(build_forest(g, sent)) == first
            checked += 1
        c.detail = "%d parsed sentences" % checked


def test_c05_abcd(acceptance):
    with criterion(acceptance, 5, "abcd: 4 derivations, 2 trees, 2 each") \
            as c:
        ds = unpack_forest(build_forest(abcd_grammar(), list("abcd")))
        trees = Counter(derive(d) for d, _ in ds)
        assert len(ds) == 4 and len(trees) == 2
        assert sorted(trees.values()) == [2, 2]
        c.detail = ", ".join(str(t) for t in sorted(trees))


def test_c06_sampler_fidelity(acceptance, toy_grammar):
    with criterion(acceptance, 6, "sampler within 4 sd at N=100,000") as c:
        t0 = time.perf_counter()
        n = 100_000
        forest = build_forest(toy_grammar, MLS)
        oracle = enumerate_derivations(toy_grammar, MLS)
        total = sum(p for _, p in oracle)
        sampler = DerivationSampler(forest, compute_inside(forest))
        rng = np.random.default_rng(2024)
        counts = Counter(sampler.sample(rng) for _ in range(n))
        assert set(counts) <= {d for d, _ in oracle}
        worst = 0.0
        for d, p in oracle:
            q = float(p / total)
            sd = math.sqrt(q * (1 - q) / n)
            z = abs(counts[d] / n - q) / sd
            worst = max(worst, z)
            assert z <= 4, "z = %.2f for %s" % (z, d)
        elapsed = time.perf_counter() - t0
        assert elapsed < 10, "%.1f s" % elapsed
        c.detail = "%d derivations, max |z| = %.2f" % (len(oracle), worst)


def test_c07_samples_for_sigma(acceptance):
    with criterion(acceptance, 7, "sigma 0.05 -> N=100, 0.01 -> N=2500"):
        assert samples_for_sigma(0.05) == 100
        assert samples_for_sigma(0.01) == 2500


def test_c08_error_bound(acceptance):
    with criterion(acceptance, 8, "error bound 0 / 1 / 0.6"):
        for n in (1, 10, 1000):
            assert mc_error_bound([1.0], n) == 0
            assert mc_error_bound([0.5, 0.5], n) == pytest.approx(1, abs=1e-12)
        assert mc_error_bound([0.9, 0.1], 1) == pytest.approx(0.6, abs=1e-12)


def test_c09_depth_one_is_scfg(acceptance):
    with criterion(acceptance, 9, "depth 1: one derivation per parse, "
                   "MPD tree = MPP tree") as c:
        checked = ties = 0
        for seed in SUITE_SEEDS:
            rng = random.Random(seed)
            corpus = load_corpus([str(random_corpus_tree(rng))
                                  for _ in range(3)])
            g = project_stsg(corpus_fragments(
                corpus, FragmentFilter(max_depth=1), "S"), "S")
            sents = [tuple(t.words()) for t in corpus.distinct()]
            sents += [s for s in random_sentences(g, seed) if s not in sents]
            for sent in sents:
                forest = build_forest(g, list(sent))
                if not forest.has_parse:
                    continue
                exact = exact_parse_distribution(forest)
                # every parse has at least one derivation
                assert count_derivations(forest)[forest.goal] == len(exact), \
                    "seed %d" % seed
                steps, p = most_probable_derivation(forest, exact=True)
                top = select_top_parses(exact)
                assert exact[derive(steps)] == p == exact[top[0]]
                if len(top) == 1:
                    assert derive(steps) == top[0], "seed %d" % seed
                else:
                    ties += 1
                checked += 1
        c.detail = "%d sentences (%d with tied best parses)" % (checked, ties)


def test_c10_mpd_differs_from_mpp(acceptance):
    with criterion(acceptance, 10, "MPD tree differs from MPP tree") as c:
        forest = build_forest(WITNESS, ["a", "b"])
        steps, p = most_probable_derivation(forest, exact=True)
        exact = exact_parse_distribution(forest)
        mpp = select_top_parses(exact)[0]
        assert derive(steps) != mpp
        c.detail = "MPD %s (%s) vs MPP %s (%s)" % (derive(steps), p, mpp,
                                                  exact[mpp])


def test_c11_metrics(acceptance):
    with criterion(acceptance, 11, "metrics: identical 100/100/100, "
                   "worked example 50%"):
        golds = [T("(S (NP Mary) (VP (V likes) (NP Susan)))"),
                 T("(S (A a b c) d)")]
        r = score(golds, golds)
        assert (r.parse_accuracy, r.sentence_accuracy,
                r.bracketing_accuracy) == (100, 100, 100)
        cand, gold = T("(S (X a b) c)"), T("(S a (Y b c))")
        assert brackets_of(cand) == {(0, 2), (0, 3)}
        assert brackets_of(gold) == {(1, 3), (0, 3)}
        r = score([cand], [gold])
        assert r.bracketing_accuracy == 50.0
        assert (r.parse_accuracy, r.sentence_accuracy) == (0, 0)


# Regression pin for the bundled 200-tree synthetic corpus; these numbers
# come from this implementation, not from any published table.
SWEEP_ARGS = ["sweep", "--mode", "mpp-mc", "--samples", "100", "--seed", "0"]
SWEEP_PIN = """\
filter-id	max-depth	max-sites	min-count	mode	parse-acc	sentence-acc	bracketing-acc	coverage	n-test	seed
d1	1	inf	1	mpp_mc(N=100)	96.97	100.00	100.00	100.00	33	0
d2	2	inf	1	mpp_mc(N=100)	93.94	96.97	98.67	100.00	33	0
d3	3	inf	1	mpp_mc(N=100)	93.94	96.97	98.67	100.00	33	0
d4	4	inf	1	mpp_mc(N=100)	93.94	96.97	98.67	100.00	33	0
d5	5	inf	1	mpp_mc(N=100)	93.94	96.97	98.67	100.00	33	0
d6	6	inf	1	mpp_mc(N=100)	93.94	96.97	98.67	100.00	33	0
dinf	inf	inf	1	mpp_mc(N=100)	93.94	96.97	98.67	100.00	33	0
"""


def _sweep():
    out = io.StringIO()
    assert main(SWEEP_ARGS, io.StringIO(), out, io.StringIO()) == 0
    return out.getvalue()


def test_c12_bundled_sweep(acceptance):
    with criterion(acceptance, 12, "bundled 200-tree sweep, deterministic, "
                   "< 2 min, pinned") as c:
        t0 = time.perf_counter()
        first = _sweep()
        elapsed = time.perf_counter() - t0
        assert elapsed < 120, "%.1f s" % elapsed
        assert _sweep() == first
        assert first == SWEEP_PIN
        c.detail = "one sweep %.1f s" % elapsed
