"""Two-sentence treebank: fragments, the projected grammar and the
derivations of a sentence that is not in the corpus."""
from fractions import Fraction

from dop import (compose, corpus_fragments, derivation_probability, derive,
                 enumerate_derivations, load_corpus, parse_bracketed,
                 project_stsg)

corpus = load_corpus([
    "(S (NP John) (VP (V likes) (NP Mary)))",
    "(S (NP Peter) (VP (V hates) (NP Susan)))",
])

# every connected subtree with full daughter lists, counted as a bag
bag = corpus_fragments(corpus)
print("fragments:", len(bag), "distinct")
print("per root:", dict(sorted(bag.root_totals.items())))

grammar = project_stsg(bag, "S")
t = parse_bracketed("(S (NP) (VP (V likes) (NP)))")
print("P(%s) = %s" % (t, grammar.prob(t)))

# leftmost composition: the first open site gets filled
step = compose(t, parse_bracketed("(NP Mary)"))
print(step)
print(compose(step, parse_bracketed("(NP Susan)")))

sentence = "Mary likes Susan".split()
derivations = enumerate_derivations(grammar, sentence)
print("\n%d derivations of %r" % (len(derivations), " ".join(sentence)))
for steps, p in sorted(derivations, key=lambda d: -d[1]):
    print("  %-8s %s" % (p, " + ".join(str(s) for s in steps)))

tree = derive(derivations[0][0])
total = sum((p for _, p in derivations), Fraction(0))
print("\nparse:", tree)
print("P(parse) =", total)
assert derivation_probability(grammar, derivations[0][0]) == derivations[0][1]
