"""Accuracy against maximum fragment depth on the bundled synthetic
treebank, plus a hapax ablation and an MPD run.

The numbers come from a generated corpus, so they show the shape of the
experiment only.
"""
import logging

from dop.evaluation import (Mode, depth_grid, reports_to_tsv,
                            run_experiment)
from dop.fragments import FragmentFilter
from dop.synthetic import bundled_corpus

logging.basicConfig(level=logging.INFO, format="%(message)s")

corpus = bundled_corpus()
print(len(corpus), "trees, start symbol", corpus.start_symbol())

sampled = Mode("mpp_mc", samples=100)
reports = run_experiment(corpus, filter_grid=depth_grid(), mode=sampled)
print(reports_to_tsv(reports))

ablation = [FragmentFilter(), FragmentFilter(min_count=2)]
reports = run_experiment(corpus, filter_grid=ablation, mode=sampled)
reports += run_experiment(corpus, mode=Mode("mpd"))
print(reports_to_tsv(reports))
