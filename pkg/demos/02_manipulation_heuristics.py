"""
How many manipulators does it take?
===================================

A coalition wants a losing candidate elected.  We draw a random 5-candidate,
5-voter election, run the five greedy heuristics, and compare their
coalition sizes against the exact minimum from the exhaustive search.
"""

import numpy as np

from elimvote import (HEURISTICS, RULES, GeneratorSpec, ManipulationInstance, brute_force_optimal_unweighted,
                      elect, evaluate, generate, minimize_manipulators)
from elimvote.profile import format_ranking

rng = np.random.default_rng(9)
profile = generate(GeneratorSpec("uniform", m=5, n=5, seed=9), rng)
names = profile.candidates
for b in profile.ballots:
    print("  ", format_ranking(names, b.order))

# Pick someone who currently loses under every rule.
preferred = next(c for c in range(5) if all(elect(r, profile)[0] != c for r in RULES))
print("coalition backs", names[preferred])

# Under Nanson only LaFit finds the 3-voter coalition; RevElim needs 11 for Borda.

for rule in RULES:
    inst = ManipulationInstance(rule, profile, preferred)
    counts = {h: minimize_manipulators(inst, h).manipulators_used for h in HEURISTICS}
    best = brute_force_optimal_unweighted(inst, min(counts.values()))
    print(f"\n{rule:8s} optimum {best.manipulators_used}  heuristics {counts}")
    for ballot in best.ballots:
        print("   ", format_ranking(names, ballot))
    assert evaluate(inst, best.ballots)
