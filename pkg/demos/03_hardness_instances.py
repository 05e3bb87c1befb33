"""
Instances behind the hardness results
=====================================

Each construction is built to hit exact score identities.  We build one of
each, check the identities, and play the intended manipulation.
"""

from elimvote import NANSON, borda_scores, elect, evaluate, heuristic_reverse
from elimvote.reductions import (PartitionInstance, X3CInstance, partition_solve, partition_to_nanson,
                                 partition_witness, pathology_identities, reverse_pathology_instance,
                                 x3c_identities, x3c_solve_small, x3c_to_baldwin, x3c_witness_vote)

# Exact cover -> one Baldwin manipulator.
x3c = X3CInstance.from_dict({"q": 6, "sets": [[1, 2, 3], [2, 3, 4], [4, 5, 6], [1, 5, 6]]})
inst = x3c_to_baldwin(x3c)
print(f"X3C: {inst.base.m} candidates, {int(inst.base.total_weight)} voters")
for key, (value, expected) in x3c_identities(inst, x3c).items():
    print(f"  {key:12s} {value} (want {expected})")
cover = x3c_solve_small(x3c)
vote = x3c_witness_vote(x3c, cover)
print("  cover", [j + 1 for j in cover], "-> manipulator vote makes c win:", evaluate(inst, [vote]))

# PARTITION -> weighted Nanson with four candidates.
part = PartitionInstance((3, 1, 1, 2, 5))
inst = partition_to_nanson(part)
print("\nPARTITION K =", part.K, "base scores", {inst.base.candidates[c]: int(s)
                                                 for c, s in borda_scores(inst.base).items()})
ballots = partition_witness(part, partition_solve(part))
combined = inst.base.with_ballots(ballots, inst.budget)
print("  after the coalition votes:", {inst.base.candidates[c]: int(s)
                                        for c, s in borda_scores(combined).items()},
      "winner", inst.base.candidates[elect(NANSON, combined, inst.policy)[0]])

# A family where the Reverse heuristic overshoots by at least n.
for n in (2, 4):
    inst = reverse_pathology_instance(n)
    ok = all(v == e for v, e in pathology_identities(inst, n).values())
    rev = heuristic_reverse(inst).manipulators_used
    print(f"\npathology n={n}: identities hold {ok}; {18 * n} identical votes suffice:",
          evaluate(inst, [(6, 0, 1, 2, 3, 4, 5)] * (18 * n)), f"; Reverse uses {rev}")
