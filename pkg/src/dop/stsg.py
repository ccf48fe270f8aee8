"""Stochastic tree-substitution grammars.

Composition substitutes a tree at the leftmost open site of another; a
derivation is a left fold of compositions. The enumeration routines here are
brute force and meant as reference oracles for small grammars.
"""
from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .treebank import Tree, parse_bracketed

__all__ = [
    "Stsg", "Derivation", "CompositionError", "NoOpenSite", "Undefined",
    "DerivationError", "StepNotInGrammar", "CapExceeded", "CyclicGrammar",
    "ProbabilityError", "compose", "derive", "derivation_probability",
    "enumerate_derivations", "exact_parse_probability", "DEFAULT_CAP",
]

DEFAULT_CAP = 100_000

Derivation = tuple  # tuple[Tree, ...], leftmost order


class CompositionError(ValueError):
    pass


class NoOpenSite(CompositionError):
    pass


class Undefined(CompositionError):
    """Root of the right operand differs from the leftmost open site."""


class DerivationError(ValueError):
    def __init__(self, step: int, cause: CompositionError):
        self.step = step
        self.cause = cause
        super().__init__("step %d: %s" % (step, cause))


class StepNotInGrammar(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


class CyclicGrammar(RuntimeError):
    """Unary chains through open sites loop back to the same label."""


class ProbabilityError(ValueError):
    pass


def _substitute(t: Tree, u: Tree) -> tuple[Tree, bool]:
    if not t.children:
        if t.is_site:
            if t.label != u.label:
                raise Undefined("leftmost site %s != root %s"
                                % (t.label, u.label))
            return u, True
        return t, False
    children = list(t.children)
    for i, child in enumerate(children):
        new, done = _substitute(child, u)
        if done:
            children[i] = new
            return Tree(t.label, children), True
    return t, False


def compose(t: Tree, u: Tree) -> Tree:
    """Leftmost substitution ``t o u``; the operands are left untouched."""
    result, done = _substitute(t, u)
    if not done:
        raise NoOpenSite("no open site in %s" % t)
    return result


def derive(steps: Sequence[Tree]) -> Tree:
    if not steps:
        raise ValueError("empty derivation")
    tree = steps[0]
    for i, u in enumerate(steps[1:], 1):
        try:
            tree = compose(tree, u)
        except CompositionError as err:
            raise DerivationError(i, err) from err
    return tree


class Stsg:
    """The five-tuple (nonterminals, terminals, start, trees, probabilities).

    ``probs`` maps elementary trees to exact rationals; they must sum to one
    per root label. ``counts`` is kept when the grammar came from a fragment
    bag, so it can be written back out.
    """

    def __init__(self, start: str, probs: dict[Tree, Fraction],
                 counts: Optional[dict[Tree, int]] = None, check: bool = True):
        self.start = start
        self.probs = {t: Fraction(p) for t, p in probs.items()}
        self.counts = counts
        nonterminals, terminals = set(), set()
        by_root = defaultdict(list)
        for t in self.probs:
            if t.terminal or not t.children:
                raise ProbabilityError("elementary tree needs > 1 node: %s" % t)
            for n in t.nodes():
                (terminals if n.terminal else nonterminals).add(n.label)
            by_root[t.label].append(t)
        nonterminals.add(start)
        self.nonterminals = frozenset(nonterminals)
        self.terminals = frozenset(terminals)
        self.by_root = {k: sorted(v) for k, v in by_root.items()}
        self._logprob = {t: math.log(p) for t, p in self.probs.items()
                         if p > 0}
        if check:
            self.check()

    def check(self):
        if self.start not in self.by_root:
            raise ProbabilityError("no elementary tree rooted %r" % self.start)
        for root, trees in self.by_root.items():
            for t in trees:
                if not 0 < self.probs[t] <= 1:
                    raise ProbabilityError("P(%s) = %s outside (0, 1]"
                                           % (t, self.probs[t]))
            total = sum(self.probs[t] for t in trees)
            if total != 1:
                raise ProbabilityError("probabilities rooted %r sum to %s"
                                       % (root, total))

    def __len__(self):
        return len(self.probs)

    def __contains__(self, t):
        return t in self.probs

    def prob(self, t: Tree) -> Fraction:
        return self.probs[t]

    def logprob(self, t: Tree) -> float:
        return self._logprob[t]

    def elementary_trees(self) -> list[Tree]:
        return sorted(self.probs)

    def to_tsv(self) -> str:
        """One elementary tree per line: tree, count, probability p/q."""
        out = ["#start\t%s\n" % self.start]
        totals = defaultdict(int)
        if self.counts:
            for t, c in self.counts.items():
                totals[t.label] += c
            for root in sorted(totals):
                out.append("#root\t%s\t%d\n" % (root, totals[root]))
        for t in self.elementary_trees():
            p = self.probs[t]
            count = self.counts[t] if self.counts else "-"
            out.append("%s\t%s\t%d/%d\n" % (t, count, p.numerator,
                                             p.denominator))
        return "".join(out)

    @classmethod
    def from_tsv(cls, lines: Iterable[str]) -> Stsg:
        start = None
        probs, counts = {}, {}
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                fields = line.split("\t")
                if fields[0] == "#start":
                    start = fields[1]
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError("line %d: expected 3 tab-separated fields"
                                 % lineno)
            tree = parse_bracketed(fields[0])
            probs[tree] = Fraction(fields[2])
            if fields[1] != "-":
                counts[tree] = int(fields[1])
        if start is None:
            raise ValueError("grammar file lacks a #start line")
        return cls(start, probs, counts or None)


def derivation_probability(g: Stsg, steps: Sequence[Tree]) -> Fraction:
    p = Fraction(1)
    for i, t in enumerate(steps):
        if t not in g.probs:
            raise StepNotInGrammar("step %d not in grammar: %s" % (i, t))
        p *= g.probs[t]
    derive(steps)
    return p


def _yield_symbols(t: Tree) -> tuple:
    return tuple((n.label, n.terminal) for n in t.nodes() if not n.children)


def enumerate_derivations(g: Stsg, sentence: Sequence[str],
                          cap: int = DEFAULT_CAP
                          ) -> list[tuple[Derivation, Fraction]]:
    """All leftmost derivations of ``sentence`` by backtracking search.

    The search keeps the yield of the partially derived tree from the
    leftmost open site onwards; terminals must match the input in place.
    Raises CapExceeded rather than truncating.
    """
    words = [str(w) for w in sentence]
    n = len(words)
    yields = {t: _yield_symbols(t) for t in g.probs}
    out: list[tuple[Derivation, Fraction]] = []
    steps: list[Tree] = []
    on_path: set = set()

    def search(pos: int, pending: tuple, prob: Fraction):
        # consume leading terminals
        while pending and pending[0][1]:
            if pos >= n or pending[0][0] != words[pos]:
                return
            pos += 1
            pending = pending[1:]
        if not pending:
            if pos == n:
                out.append((tuple(steps), prob))
                if len(out) > cap:
                    raise CapExceeded("more than %d derivations" % cap)
            return
        state = (pos, pending)
        if state in on_path:
            raise CyclicGrammar("derivation loops on %s at position %d"
                                % (pending[0][0], pos))
        on_path.add(state)
        label = pending[0][0]
        rest = pending[1:]
        for t in g.by_root.get(label, ()):
            new = yields[t] + rest
            if len(new) > n - pos:
                continue
            steps.append(t)
            search(pos, new, prob * g.probs[t])
            steps.pop()
        on_path.discard(state)

    if n == 0:
        return out
    search(0, ((g.start, False),), Fraction(1))
    return out


def _match(t: Tree, node: Tree, sites: list) -> bool:
    """Whether elementary tree ``t`` fits the top of ``node``."""
    if t.label != node.label or t.terminal != node.terminal:
        return False
    if not t.children:
        if t.is_site:
            if not node.children:
                return False
            sites.append(node)
        return True
    if len(t.children) != len(node.children):
        return False
    return all(_match(a, b, sites) for a, b in zip(t.children, node.children))


def exact_parse_probability(g: Stsg, parse: Tree) -> Fraction:
    """Sum of the probabilities of all derivations of exactly ``parse``.

    Every derivation of a tree decomposes it into elementary trees, so the
    sum factorizes over nodes: the mass of a node is the sum, over
    elementary trees matching the top of the node, of P(t) times the masses
    of the nodes at its open sites.
    """
    if parse.label != g.start or parse.terminal:
        return Fraction(0)
    memo: dict[int, Fraction] = {}

    def mass(node: Tree) -> Fraction:
        key = id(node)
        if key in memo:
            return memo[key]
        total = Fraction(0)
        for t in g.by_root.get(node.label, ()):
            sites: list = []
            if _match(t, node, sites):
                term = g.probs[t]
                for s in sites:
                    if not term:
                        break
                    term *= mass(s)
                total += term
        memo[key] = total
        return total

    return mass(parse)
