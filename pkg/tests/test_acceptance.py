"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured figures.
Criteria 7 and 8 run the full experiment protocols and take several minutes.
"""

import itertools
import math
import os
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from elimvote import (BALDWIN, BORDA, NANSON, HEURISTICS, ExperimentConfig, ManipulationInstance,
                      Profile, brute_force_optimal_unweighted, brute_force_weighted,
                      condorcet_loser, condorcet_winner, elect, evaluate, heuristic_reverse,
                      nanson_weighted_3cand, reversal, run_scaling,
                      run_small_optimal)
from elimvote.generators import GeneratorSpec, generate, urn_orders
from elimvote.reductions import (PartitionInstance, X3CInstance, partition_identities,
                                 partition_solve, partition_to_nanson, partition_witness,
                                 pathology_identities, reverse_pathology_instance, x3c_identities,
                                 x3c_solve_small, x3c_to_baldwin, x3c_witness_vote)

WORKERS = os.cpu_count() or 1
SEED = 20110807

# percent of elections where the heuristic matched the optimum, order Rev LaFit AvFit Elim RevElim
PERCENT_OPTIMAL = {
    "uniform": {
        BALDWIN: (74.4, 74.4, 75.8, 62.2, 75.2),
        NANSON: (74.6, 76.0, 78.0, 65.4, 66.9),
        BORDA: (95.7, 98.8, 99.8, 95.7, 10.7),
    },
    "urn": {
        BALDWIN: (75.1, 75.4, 77.3, 68.9, 83.4),
        NANSON: (78.1, 79.0, 79.8, 72.2, 79.4),
        BORDA: (96.1, 92.7, 99.9, 96.1, 4.4),
    },
}

# mean manipulators at m = 4, 8, 16, 32, same heuristic order
MEAN_MANIPULATORS = {
    ("uniform", BALDWIN): ((2.25, 2.25, 2.25, 2.44, 2.21), (2.99, 3.07, 3.01, 3.35, 3.06),
                           (4.31, 4.41, 4.40, 4.79, 4.67), (5.93, 6.03, 6.14, 6.61, 6.84)),
    ("uniform", NANSON): ((2.15, 2.17, 2.15, 2.25, 2.28), (2.91, 2.96, 2.84, 3.05, 3.21),
                          (4.13, 4.27, 4.05, 4.44, 4.99), (5.80, 5.88, 5.81, 6.18, 7.46)),
    ("urn", BALDWIN): ((3.26, 3.23, 3.24, 3.35, 3.14), (5.95, 5.96, 5.99, 6.37, 5.82),
                       (11.64, 11.66, 11.87, 12.74, 11.52), (21.70, 21.78, 22.35, 24.67, 22.41)),
    ("urn", NANSON): ((3.20, 3.19, 3.20, 3.28, 3.22), (5.93, 5.98, 5.95, 6.13, 6.09),
                      (11.62, 11.93, 11.64, 12.16, 12.37), (22.36, 22.78, 22.53, 24.00, 24.39)),
}
SIZES = (4, 8, 16, 32)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    return emit


def random_x3c(rng, max_q=12, max_t=12):
    q = 3 * int(rng.integers(1, max_q // 3 + 1))
    t = int(rng.integers(2, max_t + 1))
    sets = tuple(frozenset(int(v) for v in rng.choice(q, 3, replace=False)) for _ in range(t))
    return X3CInstance(q, sets)


def planted_x3c(rng, max_q=9, max_t=8):
    """Random instance with a hidden exact cover."""
    q = 3 * int(rng.integers(1, max_q // 3 + 1))
    perm = rng.permutation(q)
    sets = [frozenset(int(v) for v in perm[i:i + 3]) for i in range(0, q, 3)]
    while len(sets) < max(2, int(rng.integers(q // 3, max_t + 1))):
        sets.append(frozenset(int(v) for v in rng.choice(q, 3, replace=False)))
    order = rng.permutation(len(sets))
    return X3CInstance(q, tuple(sets[i] for i in order))


def test_criterion_01_x3c_identities(report):
    start = time.monotonic()
    rng = np.random.default_rng(SEED)
    bad = []
    for _ in range(50):
        x = random_x3c(rng)
        inst = x3c_to_baldwin(x)
        bad += [(x.q, x.t, k) for k, (v, e) in x3c_identities(inst, x).items() if v != e]
    elapsed = time.monotonic() - start
    ok = not bad and elapsed < 10
    report(1, ok, f"50 X3C instances, {len(bad)} identity mismatches, {elapsed:.1f}s")
    assert ok, bad[:5]


def test_criterion_02_partition_identities(report):
    start = time.monotonic()
    bad = []
    for K in range(1, 21):
        part = PartitionInstance((K, K))
        inst = partition_to_nanson(part)
        bad += [(K, k) for k, (v, e) in partition_identities(inst, part).items() if v != e]
        combined = inst.base.with_ballots(partition_witness(part, (0,)), inst.budget)
        scores = set(elect(NANSON, combined, inst.policy)[1].rounds[0].scores.values())
        if scores != {18 * K + 18} or elect(NANSON, combined, inst.policy)[0] != inst.preferred:
            bad.append((K, "witness"))
    elapsed = time.monotonic() - start
    ok = not bad and elapsed < 5
    report(2, ok, f"K=1..20, {len(bad)} mismatches, {elapsed:.1f}s")
    assert ok, bad


def test_criterion_03_witness_soundness(report):
    start = time.monotonic()
    rng = np.random.default_rng(SEED + 3)
    x3c_ok = 0
    for _ in range(20):
        x = planted_x3c(rng)
        cover = x3c_solve_small(x)
        x3c_ok += cover is not None and evaluate(x3c_to_baldwin(x), [x3c_witness_vote(x, cover)])
    part_ok = 0
    solvable = 0
    while solvable < 20:
        values = tuple(int(v) for v in rng.integers(1, 10, int(rng.integers(2, 7))))
        if sum(values) % 2:
            continue
        part = PartitionInstance(values)
        half = partition_solve(part)
        if half is None:
            continue
        solvable += 1
        inst = partition_to_nanson(part)
        part_ok += evaluate(inst, partition_witness(part, half), inst.budget)
    elapsed = time.monotonic() - start
    ok = x3c_ok == 20 and part_ok == 20 and elapsed < 30
    report(3, ok, f"X3C witnesses {x3c_ok}/20, PARTITION witnesses {part_ok}/20, {elapsed:.1f}s")
    assert ok


def test_criterion_04_reduction_equivalence(report):
    start = time.monotonic()
    # with q = 3 every 3-subset is the whole ground set, so each instance is solvable
    x3c_cases = x3c_agree = 0
    for t in range(2, 4):
        x = X3CInstance(3, (frozenset({0, 1, 2}),) * t)
        solvable = x3c_solve_small(x) is not None
        res = brute_force_optimal_unweighted(x3c_to_baldwin(x), 1)
        x3c_cases += 1
        x3c_agree += solvable == (res is not None)
    part_cases = part_agree = 0
    for size in range(1, 5):
        for values in itertools.combinations_with_replacement(range(1, 5), size):
            if sum(values) % 2:
                continue
            part = PartitionInstance(values)
            feasible, _ = brute_force_weighted(partition_to_nanson(part))
            part_cases += 1
            part_agree += feasible == (partition_solve(part) is not None)
    elapsed = time.monotonic() - start
    ok = x3c_agree == x3c_cases and part_agree == part_cases and elapsed < 600
    report(4, ok, f"X3C q=3 {x3c_agree}/{x3c_cases} agree, PARTITION {part_agree}/{part_cases} agree, "
                  f"{elapsed:.1f}s")
    assert ok


def test_criterion_05_nanson_three_candidates(report):
    start = time.monotonic()
    rng = np.random.default_rng(SEED + 5)
    disagree = feasible = 0
    for i in range(1000):
        m = 3
        n = int(rng.integers(1, 6))
        orders = [tuple(int(x) for x in rng.permutation(m)) for _ in range(n)]
        base = Profile.from_rankings("abc", orders, [int(w) for w in rng.integers(1, 11, n)])
        weights = tuple(Fraction(int(w)) for w in rng.integers(1, 11, int(rng.integers(1, 5))))
        inst = ManipulationInstance(NANSON, base, int(rng.integers(m)), weights)
        fast, _ = nanson_weighted_3cand(inst)
        exact, _ = brute_force_weighted(inst)
        disagree += fast != exact
        feasible += exact
    elapsed = time.monotonic() - start
    ok = disagree == 0 and elapsed < 120
    report(5, ok, f"1000 instances ({feasible} feasible), {disagree} disagreements, {elapsed:.1f}s")
    assert ok


def test_criterion_06_borda_reverse_bound(report):
    start = time.monotonic()
    gaps = Counter()
    for i in range(500):
        rng = np.random.default_rng(SEED + 600 + i)
        p = generate(GeneratorSpec("uniform", 5, 5, SEED + 600 + i), rng)
        inst = ManipulationInstance(BORDA, p, int(rng.integers(5)))
        rev = heuristic_reverse(inst).manipulators_used
        opt = brute_force_optimal_unweighted(inst, rev).manipulators_used
        gaps[rev - opt] += 1
    elapsed = time.monotonic() - start
    ok = set(gaps) <= {0, 1} and elapsed < 600
    report(6, ok, f"Rev minus optimum over 500 instances: {dict(sorted(gaps.items()))}, {elapsed:.1f}s")
    assert ok


def _percent_table(model):
    cfg = ExperimentConfig(protocol="small", elections=3000, model=model, seed=SEED, workers=WORKERS)
    _, summary = run_small_optimal(cfg)
    return {row["rule"]: tuple(row["cells"][h]["percent"] for h in HEURISTICS) for row in summary["rows"]}


def test_criterion_07_percent_optimal_tables(report):
    start = time.monotonic()
    measured = {model: _percent_table(model) for model in ("uniform", "urn")}
    elapsed = time.monotonic() - start
    misses = []
    for model, rows in PERCENT_OPTIMAL.items():
        for rule, paper in rows.items():
            for h, want, got in zip(HEURISTICS, paper, measured[model][rule]):
                if abs(got - want) > 5:
                    misses.append(f"{model}/{rule}/{h} {got:.1f} vs {want}")
    uni = measured["uniform"]
    idx = dict(zip(HEURISTICS, range(5)))
    orderings = (
        all(measured[m][BORDA][idx["avfit"]] == max(measured[m][BORDA]) > 95 for m in measured)
        and all(uni[r][idx["elim"]] == min(uni[r]) for r in (BALDWIN, NANSON))
        and all(measured[m][BORDA][idx["revelim"]] == min(measured[m][BORDA]) < 20 for m in measured)
    )
    ok = (not misses or orderings) and elapsed < 7200
    cells = "; ".join(f"{m}/{r}: " + "/".join(f"{v:.1f}" for v in measured[m][r])
                      for m in measured for r in measured[m])
    report(7, ok, f"{30 - len(misses)}/30 cells within 5pp, orderings {'hold' if orderings else 'broken'}, "
                  f"{elapsed:.0f}s [{cells}]" + (f" misses: {misses}" if misses else ""))
    assert ok, misses


def test_criterion_08_scaling_means(report):
    start = time.monotonic()
    misses, measured = [], {}
    for model in ("uniform", "urn"):
        cfg = ExperimentConfig(protocol="scaling", rules=(BALDWIN, NANSON), sizes=SIZES, elections=200,
                               model=model, seed=SEED, workers=WORKERS)
        _, summary = run_scaling(cfg)
        for row in summary["rows"]:
            got = tuple(row["cells"][h]["mean"] for h in HEURISTICS)
            measured[(model, row["rule"], row["m"])] = got
            paper = MEAN_MANIPULATORS[(model, row["rule"])][SIZES.index(row["m"])]
            for h, want, value in zip(HEURISTICS, paper, got):
                if abs(value - want) > 0.10 * want:
                    misses.append(f"{model}/{row['rule']}/m={row['m']}/{h} {value:.2f} vs {want}")
    rev, revelim = measured[("uniform", BALDWIN, 32)][0], measured[("uniform", BALDWIN, 32)][4]
    elapsed = time.monotonic() - start
    ok = not misses and rev <= revelim and elapsed < 3600
    report(8, ok, f"{80 - len(misses)}/80 means within 10%, uniform Baldwin m=32 Rev {rev:.2f} "
                  f"<= RevElim {revelim:.2f}: {rev <= revelim}, {elapsed:.0f}s"
                  + (f" misses: {misses}" if misses else ""))
    assert ok, misses


def test_criterion_09_pathology(report):
    start = time.monotonic()
    details, ok = [], True
    for n in (2, 4):
        inst = reverse_pathology_instance(n)
        identities = all(v == e for v, e in pathology_identities(inst, n).values())
        identical = evaluate(inst, [(6, 0, 1, 2, 3, 4, 5)] * (18 * n))
        rev = heuristic_reverse(inst).manipulators_used
        ok &= identities and identical and rev >= 19 * n
        details.append(f"n={n}: identities {identities}, 18n identical ballots win {identical}, Rev {rev}")
    elapsed = time.monotonic() - start
    ok &= elapsed < 60
    report(9, ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok


def _tie_free_nanson(p):
    for r in elect(NANSON, p)[1].rounds:
        vals = list(r.scores.values())
        if len(set(vals)) < len(vals) or r.average in vals:
            return False
    return True


def test_criterion_10_rule_properties(report):
    start = time.monotonic()
    rng = np.random.default_rng(SEED + 10)
    counts = Counter()
    for i in range(10_000):
        m = int(rng.integers(2, 7))
        n = 2 * int(rng.integers(0, 5)) + 1
        p = generate(GeneratorSpec("uniform" if i % 2 else "urn", m, n, SEED + 10 + i), rng)
        winners = {rule: elect(rule, p)[0] for rule in (BALDWIN, NANSON)}
        cw, cl = condorcet_winner(p), condorcet_loser(p)
        if cw is not None:
            counts["cw"] += 1
            counts["cw_bad"] += any(w != cw for w in winners.values())
        if cl is not None:
            counts["cl"] += 1
            counts["cl_bad"] += any(w == cl for w in winners.values())
        if m == 2:
            counts["m2"] += 1
            a = sum(b.order[0] == 0 for b in p.ballots)
            counts["m2_bad"] += winners[BALDWIN] != (0 if 2 * a > n else 1)
        r = reversal(p)
        if _tie_free_nanson(p) and _tie_free_nanson(r):
            counts["rev"] += 1
            counts["rev_bad"] += elect(NANSON, r)[0] == winners[NANSON]
    elapsed = time.monotonic() - start
    ok = not (counts["cw_bad"] or counts["cl_bad"] or counts["m2_bad"] or counts["rev_bad"]) and elapsed < 300
    report(10, ok, f"Condorcet winner {counts['cw'] - counts['cw_bad']}/{counts['cw']}, "
                   f"loser avoided {counts['cl'] - counts['cl_bad']}/{counts['cl']}, "
                   f"m=2 majority {counts['m2'] - counts['m2_bad']}/{counts['m2']}, "
                   f"Nanson reversal {counts['rev'] - counts['rev_bad']}/{counts['rev']}, {elapsed:.1f}s")
    assert ok, counts


def test_criterion_11_urn_repeat(report):
    start = time.monotonic()
    trials = 10_000
    m = 5
    same = sum(len(set(urn_orders(m, 2, math.factorial(m), SEED + i))) == 1 for i in range(trials)) / trials
    elapsed = time.monotonic() - start
    ok = abs(same - 0.5) <= 0.02 and elapsed < 10
    report(11, ok, f"P(vote2 = vote1) = {same:.4f} over {trials} trials (m={m}, a=m!), {elapsed:.1f}s")
    assert ok
