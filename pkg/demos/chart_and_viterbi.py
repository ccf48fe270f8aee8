"""Packed derivation forest for an ambiguous sentence, its inside masses,
the most probable derivation and the exact parse distribution."""
from dop import (build_forest, compute_inside, corpus_fragments, derive,
                 exact_parse_distribution, load_corpus,
                 most_probable_derivation, project_stsg, unpack_forest)

corpus = load_corpus([
    "(S (NP I) (VP (V saw) (NP (NP man) (PP (P with) (NP tel)))))",
    "(S (NP I) (VP (V saw) (NP man) (PP (P with) (NP tel))))",
    "(S (NP I) (VP (V saw) (NP (NP man) (PP (P with) (NP dog)))))",
])
grammar = project_stsg(corpus_fragments(corpus), "S")
print(len(grammar.probs), "elementary trees")

sentence = "I saw man with tel".split()
forest = build_forest(grammar, sentence)
print("forest: %d entries, %d edges" % (len(forest.entries),
                                        forest.num_edges()))
# a few lines of the debug dump
for line in forest.dump().splitlines()[:5]:
    print("  " + line)

masses = compute_inside(forest, exact=True)
print("P(sentence) =", masses.sentence_probability)
print("derivations:", len(unpack_forest(forest)))

steps, p = most_probable_derivation(forest, exact=True)
print("\nmost probable derivation (%s):" % p)
for s in steps:
    print("  " + str(s))
print("its tree:", derive(steps))

print("\nexact parse probabilities, given the sentence:")
dist = exact_parse_distribution(forest)
total = sum(dist.values())
for tree, q in sorted(dist.items(), key=lambda kv: -kv[1]):
    print("  %.4f  %s" % (q / total, tree))
