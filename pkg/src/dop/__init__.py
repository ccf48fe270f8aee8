"""Data-oriented parsing with stochastic tree-substitution grammars."""
from .treebank import (Corpus, Label, Tree, load_corpus, parse_bracketed,
                       read_corpus, serialize_tree, tree_yield)
from .fragments import (FragmentBag, FragmentFilter, corpus_fragments,
                        extract_subtrees, project_stsg)
from .stsg import (Stsg, compose, derivation_probability, derive,
                   enumerate_derivations, exact_parse_probability)
from .chart import DerivationForest, build_forest, unpack_forest
from .disambiguation import (compute_inside, estimate_parse_distribution,
                             exact_parse_distribution, mc_error_bound,
                             most_probable_derivation, sample_derivation,
                             samples_for_sigma, select_top_parses)
from .evaluation import (Mode, binarize, brackets_of, crosses, run_experiment,
                         score)

__version__ = "0.1.0"

__all__ = [
    "Corpus", "Label", "Tree", "load_corpus", "parse_bracketed",
    "read_corpus", "serialize_tree", "tree_yield", "FragmentBag",
    "FragmentFilter", "corpus_fragments", "extract_subtrees", "project_stsg",
    "Stsg", "compose", "derivation_probability", "derive",
    "enumerate_derivations", "exact_parse_probability", "DerivationForest",
    "build_forest", "unpack_forest", "compute_inside",
    "estimate_parse_distribution", "exact_parse_distribution",
    "mc_error_bound", "most_probable_derivation", "sample_derivation",
    "samples_for_sigma", "select_top_parses", "Mode", "binarize",
    "brackets_of", "crosses", "run_experiment", "score",
]
