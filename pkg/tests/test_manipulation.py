import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import naive
from elimvote import (BALDWIN, BORDA, HEURISTICS, NANSON, RULES, ManipulationInstance, Profile,
                      evaluate, heuristic_average_fit, heuristic_eliminate, heuristic_largest_fit,
                      heuristic_reverse, lower_bound, minimize_manipulators,
                      scores_to_ballots)
from elimvote import manipulation
from elimvote.manipulation import ConstructionError, IterationCapError
from strategies import profiles, votes

SMALL = Profile.from_rankings("abc", ["abc"] * 3 + ["bca"] * 2)


def names(ballots, cands="abc"):
    return ["".join(cands[i] for i in b) for b in ballots]


def test_evaluate_with_no_ballots():
    assert evaluate(ManipulationInstance(BALDWIN, SMALL, 0), [])
    assert not evaluate(ManipulationInstance(BALDWIN, SMALL, 2), [])


def test_evaluate_rejects_foreign_ballots():
    with pytest.raises(Exception):
        evaluate(ManipulationInstance(BALDWIN, SMALL, 0), [(0, 1)])


@pytest.mark.parametrize("rule", RULES)
@pytest.mark.parametrize("heuristic", HEURISTICS)
def test_already_winning_needs_nobody(rule, heuristic):
    winner = {BORDA: 1, BALDWIN: 0, NANSON: 0}[rule]
    res = minimize_manipulators(ManipulationInstance(rule, SMALL, winner), heuristic)
    assert res.success and res.manipulators_used == 0 and res.ballots == ()


def test_reverse_ballots_on_small_profile():
    res = heuristic_reverse(ManipulationInstance(BORDA, SMALL, 2))
    assert names(res.ballots) == ["cab", "cba", "cab"]
    assert res.trace.rounds[0].scores == {0: 8, 1: 8, 2: 8}


# expected counts cross-checked against the exhaustive reference optimum (3)
@pytest.mark.parametrize("rule, counts, bound", [
    (BORDA, {"rev": 3, "lafit": 3, "avfit": 3, "elim": 3, "revelim": 5}, 3),
    (NANSON, {"rev": 3, "lafit": 3, "avfit": 3, "elim": 5, "revelim": 3}, 3),
    (BALDWIN, {"rev": 3, "lafit": 3, "avfit": 3, "elim": 5, "revelim": 3}, 2),
])
def test_small_profile_counts(rule, counts, bound):
    inst = ManipulationInstance(rule, SMALL, 2)
    assert naive.optimum(rule, votes(SMALL), 3, 2, 4) == 3
    assert {h: minimize_manipulators(inst, h).manipulators_used for h in HEURISTICS} == counts
    assert lower_bound(inst) == bound


def test_borda_elim_equals_reverse():
    inst = ManipulationInstance(BORDA, SMALL, 2)
    assert heuristic_eliminate(inst).ballots == heuristic_reverse(inst).ballots


def test_two_candidate_fit():
    p = Profile.from_rankings("ab", ["ab"] * 2)
    inst = ManipulationInstance(BALDWIN, p, 1)
    res = heuristic_largest_fit(inst, 2)
    assert res.success and names(res.ballots, "ab") == ["ba", "ba"]
    assert heuristic_average_fit(inst, 2).ballots == res.ballots
    assert not heuristic_largest_fit(inst, 1).success


def test_fit_budget_below_bound_fails():
    inst = ManipulationInstance(BORDA, SMALL, 2)
    assert not heuristic_largest_fit(inst, 2).success
    assert not heuristic_average_fit(inst, 2).success
    with pytest.raises(ValueError):
        heuristic_largest_fit(inst, 0)


def test_count_budget_is_respected():
    inst = ManipulationInstance(BORDA, SMALL, 2, budget=2)
    assert not heuristic_reverse(inst).success
    res = minimize_manipulators(inst, "lafit")
    assert not res.success


def test_weighted_instance_rejected_by_heuristics():
    inst = ManipulationInstance(NANSON, SMALL, 2, (1, 2))
    with pytest.raises(ValueError):
        minimize_manipulators(inst, "rev")
    with pytest.raises(ValueError):
        ManipulationInstance(NANSON, SMALL, 2, (1, 0))


def test_iteration_cap(monkeypatch):
    monkeypatch.setattr(manipulation, "_iteration_cap", lambda inst: 1)
    with pytest.raises(IterationCapError):
        heuristic_reverse(ManipulationInstance(BORDA, SMALL, 2))


def test_result_json():
    d = heuristic_reverse(ManipulationInstance(BORDA, SMALL, 2)).to_dict()
    assert d["ballots"] == ["c>a>b", "c>b>a", "c>a>b"]
    assert d["success"] and d["manipulators_used"] == 3 and d["rule"] == BORDA
    json.dumps(d)


def test_scores_to_ballots_examples():
    assert scores_to_ballots({1: [1], 0: [0]}, 1, 2) == [(2, 1, 0)]
    got = scores_to_ballots({0: [1, 0], 1: [1, 0]}, 2, 2)
    assert sorted(got) == [(2, 0, 1), (2, 1, 0)]


@pytest.mark.parametrize("assigned", [
    {0: [1], 1: [1]},
    {0: [1, 0], 1: [1]},
    {0: [2], 1: [0]},
])
def test_scores_to_ballots_rejects_bad_multisets(assigned):
    with pytest.raises(ConstructionError):
        scores_to_ballots(assigned, len(assigned[0]), 2)


@st.composite
def score_multisets(draw):
    m = draw(st.integers(2, 7))
    k = draw(st.integers(1, 6))
    others = list(range(1, m))
    pool = [v for v in range(m - 1) for _ in range(k)]
    pool = draw(st.permutations(pool))
    return {d: sorted(pool[i * k:(i + 1) * k]) for i, d in enumerate(others)}, k, m


@settings(max_examples=200, deadline=None)
@given(score_multisets())
def test_scores_to_ballots_round_trip(data):
    assigned, k, m = data
    ballots = scores_to_ballots(assigned, k, 0)
    assert len(ballots) == k
    got = {d: [] for d in assigned}
    for b in ballots:
        assert b[0] == 0 and sorted(b) == list(range(m))
        for pos, d in enumerate(b[1:], start=1):
            got[d].append(m - 1 - pos)
    assert {d: sorted(v) for d, v in got.items()} == assigned


@settings(max_examples=80, deadline=None)
@given(profiles(min_m=2, max_m=4, max_n=4), st.data())
def test_heuristics_sound_and_dominated_by_optimum(p, data):
    c = data.draw(st.integers(0, p.m - 1))
    rule = data.draw(st.sampled_from(RULES))
    inst = ManipulationInstance(rule, p, c)
    counts = {}
    for h in HEURISTICS:
        res = minimize_manipulators(inst, h)
        assert res.success and res.manipulators_used == len(res.ballots)
        assert all(b[0] == c for b in res.ballots)
        combined = votes(p) + [(b, 1) for b in res.ballots]
        assert naive.RULE[rule](combined, p.m, c) == c
        counts[h] = res.manipulators_used
    best = min(counts.values())
    opt = naive.optimum(rule, votes(p), p.m, c, min(best, 3 if p.m == 4 else 5))
    if opt is not None:
        assert best >= opt
        assert lower_bound(inst) <= opt
        if rule == BORDA:
            assert counts["rev"] - opt <= 1
