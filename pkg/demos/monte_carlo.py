"""Monte Carlo estimate of the most probable parse and how the estimate
tightens with the number of samples."""
import numpy as np

from dop import (build_forest, compute_inside, corpus_fragments,
                 estimate_parse_distribution, exact_parse_distribution,
                 load_corpus, mc_error_bound, project_stsg,
                 samples_for_sigma, select_top_parses)

corpus = load_corpus([
    "(S (NP I) (VP (V saw) (NP (NP man) (PP (P with) (NP tel)))))",
    "(S (NP I) (VP (V saw) (NP man) (PP (P with) (NP tel))))",
    "(S (NP I) (VP (V saw) (NP (NP man) (PP (P with) (NP dog)))))",
])
grammar = project_stsg(corpus_fragments(corpus), "S")
forest = build_forest(grammar, "I saw man with tel".split())
masses = compute_inside(forest)

exact = exact_parse_distribution(forest)
total = sum(exact.values())
truth = {t: float(p / total) for t, p in exact.items()}
best = select_top_parses(exact)[0]
print("exact best parse: %.4f %s" % (truth[best], best))

for sigma in (0.1, 0.05, 0.01):
    n = samples_for_sigma(sigma)
    dist = estimate_parse_distribution(forest, masses, sigma=sigma, seed=0)
    top = select_top_parses(dist)[0]
    print("sigma %.2f  N=%5d  estimate %.4f  %s" % (
        sigma, n, dist.estimate(best), "ok" if top == best else "MISSED"))

# spread of the estimate over repeated runs
n = 100
runs = [estimate_parse_distribution(forest, masses, n=n, seed=s).estimate(best)
        for s in range(200)]
print("\nN=%d over 200 runs: mean %.4f, sd %.4f (bound %.4f)" % (
    n, np.mean(runs), np.std(runs, ddof=1), 0.5 / np.sqrt(n)))

p = sorted(truth.values(), reverse=True)
for n in (1, 10, 100, 1000):
    print("N=%4d  P(wrong argmax) <= %.3g" % (n, mc_error_bound(p, n)))
