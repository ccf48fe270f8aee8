"""Command-line entry point: ``dop extract|parse|eval|sweep``.

Exit status is 0 on success, 1 on a usage error and 2 on a data error
(unreadable or malformed corpus/grammar). Sentences without a parse are
reported in the output and do not change the exit status.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .evaluation import (
    Mode, depth_grid, parse_sentence, reports_to_tsv, run_experiment,
)
from .fragments import FragmentFilter, corpus_fragments, project_stsg
from .stsg import Stsg
from .synthetic import bundled_corpus
from .treebank import read_corpus

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
MODES = {"mpd": "mpd", "mpp-mc": "mpp_mc", "mpp-exact": "mpp_exact"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("%s: %s" % (self.prog, message))


def _depth(text: str) -> Optional[int]:
    if text in ("inf", "none", "unbounded"):
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("depth must be >= 1 or 'inf'")
    return value


def _depth_list(text: str):
    try:
        return [_depth(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError("bad depth list %r" % text)


def _add_filter(p):
    g = p.add_argument_group("fragment filter")
    g.add_argument("--max-depth", type=_depth, default=None,
                   help="maximum fragment depth (default: unbounded)")
    g.add_argument("--max-sites", type=int, default=None,
                   help="maximum open substitution sites per fragment")
    g.add_argument("--roots", default=None,
                   help="comma-separated root labels to keep")
    g.add_argument("--min-count", type=int, default=1,
                   help="drop fragments seen fewer times (2 drops hapaxes)")
    g.add_argument("--hapax-min-depth", type=int, default=None,
                   help="apply --min-count only above this depth")


def _add_mode(p):
    g = p.add_argument_group("disambiguation")
    g.add_argument("--mode", choices=sorted(MODES), default="mpp-mc")
    g.add_argument("--sigma", type=float, default=None,
                   help="target standard error for mpp-mc")
    g.add_argument("--samples", type=int, default=None,
                   help="sample count for mpp-mc")
    g.add_argument("--seed", type=int, default=None,
                   help="random seed (required for mpp-mc)")


def _add_split(p):
    p.add_argument("--train-fraction", type=float, default=5 / 6)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dop", description="Data-oriented parsing with "
                     "stochastic tree-substitution grammars.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("extract", help="corpus -> grammar TSV")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default=None)
    _add_filter(p)

    p = sub.add_parser("parse", help="parse token lines read from stdin")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--grammar", help="grammar TSV written by extract")
    src.add_argument("--corpus", help="extract a grammar on the fly")
    p.add_argument("--out", default=None)
    p.add_argument("--tie-width", type=float, default=0.0)
    _add_filter(p)
    _add_mode(p)

    for name, text in (("eval", "one train/test run -> report TSV"),
                       ("sweep", "depth sweep -> report TSV")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--corpus", default=None,
                       help="treebank file (default: bundled synthetic)")
        p.add_argument("--out", default=None)
        _add_filter(p)
        _add_mode(p)
        _add_split(p)
        if name == "sweep":
            p.add_argument("--depths", type=_depth_list,
                           default=[1, 2, 3, 4, 5, 6, None],
                           help="comma-separated depths, 'inf' = unbounded")
    return parser


def _filter(args) -> FragmentFilter:
    roots = None
    if args.roots is not None:
        roots = frozenset(r for r in args.roots.split(",") if r)
    try:
        return FragmentFilter(args.max_depth, args.max_sites, roots,
                              args.min_count, args.hapax_min_depth)
    except ValueError as err:
        raise UsageError(str(err))


def _mode(args) -> Mode:
    kind = MODES[args.mode]
    if kind == "mpp_mc":
        if (args.sigma is None) == (args.samples is None):
            raise UsageError("mpp-mc needs exactly one of --sigma/--samples")
        if args.seed is None:
            raise UsageError("mpp-mc needs --seed")
        if args.sigma is not None and not 0 < args.sigma <= 0.5:
            raise UsageError("--sigma must lie in (0, 0.5]")
        if args.samples is not None and args.samples < 1:
            raise UsageError("--samples must be >= 1")
        return Mode(kind, sigma=args.sigma, samples=args.samples)
    if args.sigma is not None or args.samples is not None:
        raise UsageError("--sigma/--samples only apply to mpp-mc")
    return Mode(kind)


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return "%.6g" % value


def _write(text: str, path: Optional[str], stdout):
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_corpus(path):
    try:
        return read_corpus(path)
    except ValueError as err:
        raise ValueError("%s: %s" % (path, err)) from err


def _grammar_from_corpus(path, filt) -> Stsg:
    corpus = _read_corpus(path)
    start = corpus.start_symbol()
    return project_stsg(corpus_fragments(corpus, filt, start), start)


def cmd_extract(args, stdin, stdout):
    g = _grammar_from_corpus(args.corpus, _filter(args))
    _write(g.to_tsv(), args.out, stdout)


def cmd_parse(args, stdin, stdout):
    mode = _mode(args)
    if args.tie_width < 0:
        raise UsageError("--tie-width must be >= 0")
    if args.grammar is not None:
        with open(args.grammar, encoding="utf-8") as fh:
            try:
                grammar = Stsg.from_tsv(fh)
            except ValueError as err:
                raise ValueError("%s: %s" % (args.grammar, err)) from err
    else:
        grammar = _grammar_from_corpus(args.corpus, _filter(args))
    sentences = [line.split() for line in stdin if line.strip()]
    seeds = np.random.SeedSequence(args.seed or 0).spawn(len(sentences))
    out = []
    for words, seed in zip(sentences, seeds):
        status, parses, values, n = parse_sentence(grammar, words, mode, seed,
                                                   args.tie_width)
        out.append("sentence\t%s\n" % " ".join(words))
        if status != "ok":
            out.append("NO-PARSE %s\n\n" % status)
            continue
        for tree, value in zip(parses, values):
            out.append("parse\t%s\t%s\n" % (tree, _fmt(value)))
        if n is not None:
            out.append("samples\t%d\n" % n)
            out.append("sigma-bound\t%s\n" % _fmt(0.5 / n ** 0.5))
        out.append("\n")
    _write("".join(out), args.out, stdout)


def _experiment(args, grid, stdout):
    mode = _mode(args)
    if not 0 < args.train_fraction < 1:
        raise UsageError("--train-fraction must lie in (0, 1)")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    corpus = bundled_corpus() if args.corpus is None \
        else _read_corpus(args.corpus)
    reports = run_experiment(corpus, args.train_fraction, args.split_seed,
                             grid, mode, args.seed or 0, args.jobs)
    _write(reports_to_tsv(reports), args.out, stdout)


def cmd_eval(args, stdin, stdout):
    _experiment(args, [_filter(args)], stdout)


def cmd_sweep(args, stdin, stdout):
    base = _filter(args)
    grid = depth_grid(args.depths, max_substitution_sites=base.
                      max_substitution_sites, root_whitelist=base.
                      root_whitelist, min_count=base.min_count,
                      hapax_min_depth=base.hapax_min_depth)
    _experiment(args, grid, stdout)


COMMANDS = {"extract": cmd_extract, "parse": cmd_parse, "eval": cmd_eval,
            "sweep": cmd_sweep}


def main(argv: Optional[Sequence[str]] = None, stdin=None, stdout=None,
         stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, stdin, stdout)
    except UsageError as err:
        print("usage error: %s" % err, file=stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as err:
        print("error: %s" % err, file=stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
