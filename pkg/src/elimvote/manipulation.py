"""Coalitional manipulation: problem instances and approximation heuristics.

A manipulation instance fixes a rule, the non-manipulators' profile, the
preferred candidate ``c`` and a budget (a manipulator count, a list of
manipulator weights, or ``None`` for "as many as needed").  Ties are always
broken in favour of ``c``.

Five heuristics construct unweighted manipulations, every one of them putting
``c`` first in each ballot:

``rev``      ballots one at a time, others in increasing order of their
             current Borda score (highest scorer last).
``lafit``    for a target ``k``, deal the non-top Borda scores largest first
             to the candidate with the lowest current score.
``avfit``    as ``lafit`` but to the candidate with the largest remaining
             gap per free slot.
``elim``     ballots one at a time, others in the current elimination
             order (first eliminated right after ``c``).
``revelim``  ballots one at a time, others in reverse elimination order
             (first eliminated last).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _kernels
from ._kernels import BALDWIN, BORDA, NANSON, RULES
from .profile import Profile, format_ranking
from .rules import EliminationTrace, TieBreak, elect

__all__ = [
    "HEURISTICS",
    "ManipulationInstance",
    "ManipulationResult",
    "ConstructionError",
    "IterationCapError",
    "evaluate",
    "heuristic_reverse",
    "heuristic_largest_fit",
    "heuristic_average_fit",
    "heuristic_eliminate",
    "heuristic_rev_eliminate",
    "scores_to_ballots",
    "lower_bound",
    "minimize_manipulators",
    "run_heuristic",
]

HEURISTICS = ("rev", "lafit", "avfit", "elim", "revelim")


class ConstructionError(RuntimeError):
    """Score multisets that cannot be turned into ballots (a heuristic bug)."""


class IterationCapError(RuntimeError):
    """An iterative heuristic exceeded its hard iteration cap."""


@dataclass(frozen=True)
class ManipulationInstance:
    rule: str
    base: Profile
    preferred: int
    budget: int | tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        object.__setattr__(self, "preferred", self.base.index(self.preferred))
        if isinstance(self.budget, (list, tuple)):
            weights = tuple(Fraction(w) for w in self.budget)
            if any(w <= 0 for w in weights):
                raise ValueError("manipulator weights must be positive")
            object.__setattr__(self, "budget", weights)
        elif self.budget is not None and self.budget < 0:
            raise ValueError("manipulator count must be non-negative")

    @property
    def weighted(self) -> bool:
        return isinstance(self.budget, tuple)

    @property
    def policy(self) -> TieBreak:
        return TieBreak(self.preferred)


@dataclass(frozen=True)
class ManipulationResult:
    success: bool
    ballots: tuple[tuple[int, ...], ...]
    manipulators_used: int
    trace: EliminationTrace | None = None
    rule: str = ""
    weights: tuple[Fraction, ...] | None = field(default=None)

    def to_dict(self) -> dict:
        names = self.trace.candidates if self.trace else None
        out = {
            "success": self.success,
            "manipulators_used": self.manipulators_used,
            "ballots": [format_ranking(names, b) for b in self.ballots] if names else
                       [list(b) for b in self.ballots],
            "rule": self.rule,
            "trace": self.trace.to_dict() if self.trace else None,
        }
        if self.weights is not None:
            out["weights"] = [str(w) for w in self.weights]
        return out


def combined(instance: ManipulationInstance, ballots, weights=None) -> Profile:
    return instance.base.with_ballots(ballots, weights)


def evaluate(instance: ManipulationInstance, ballots: Sequence[Sequence[int]], weights=None) -> bool:
    """Does ``instance.preferred`` win once ``ballots`` are added?

    For weighted instances the ballots pair up with ``instance.budget`` unless
    explicit ``weights`` are given.
    """
    if weights is None and instance.weighted:
        weights = instance.budget
        if len(ballots) != len(weights):
            raise ValueError(f"{len(weights)} weighted manipulators but {len(ballots)} ballots")
    profile = combined(instance, ballots, weights)
    return elect(instance.rule, profile, instance.policy)[0] == instance.preferred


def _result(instance, ballots, success, weights=None) -> ManipulationResult:
    profile = combined(instance, ballots, weights)
    _, trace = elect(instance.rule, profile, instance.policy)
    return ManipulationResult(success, tuple(tuple(b) for b in ballots), len(ballots),
                              trace, instance.rule, weights)


class _State:
    """Running tally of base plus manipulator ballots (integer, scaled)."""

    def __init__(self, instance: ManipulationInstance):
        t = instance.base.tally
        self.rule = instance.rule
        self.c = instance.preferred
        self.m = instance.base.m
        self.scale = t.scale
        self.counts = np.array(t.counts, copy=True)
        self.rank = _kernels.tie_rank(self.m, self.c)

    def add(self, order):
        pos = np.empty(self.m, dtype=np.int64)
        pos[list(order)] = np.arange(self.m)
        self.counts += self.scale * (pos[:, None] < pos[None, :])

    def wins(self) -> bool:
        return _kernels.winner(self.rule, self.counts, self.rank) == self.c

    def borda(self):
        return self.counts.sum(axis=1)


def _iteration_cap(instance) -> int:
    return 50 * (int(math.ceil(instance.base.total_weight)) + 1)


def _iterative(instance: ManipulationInstance, next_ballot, name: str) -> ManipulationResult:
    state = _State(instance)
    ballots = []
    limit = instance.budget if isinstance(instance.budget, int) else None
    cap = _iteration_cap(instance)
    while not state.wins():
        if limit is not None and len(ballots) >= limit:
            return _result(instance, ballots, False)
        if len(ballots) >= cap:
            raise IterationCapError(
                f"{name} did not make candidate {instance.preferred} win under "
                f"{instance.rule} within {cap} ballots"
            )
        ballot = next_ballot(state)
        state.add(ballot)
        ballots.append(ballot)
    return _result(instance, ballots, True)


def _reverse_ballot(state: _State):
    scores = state.borda()
    others = [d for d in range(state.m) if d != state.c]
    # equal scores: the tie-break-favoured candidate takes the worse position
    others.sort(key=lambda d: (scores[d], -state.rank[d]))
    return (state.c, *others)


def _elim_order(state: _State):
    groups, _ = _kernels.elimination_groups(state.rule, state.counts, state.rank)
    return [d for g in groups for d in g if d != state.c]


def heuristic_reverse(instance: ManipulationInstance) -> ManipulationResult:
    return _iterative(instance, _reverse_ballot, "rev")


def heuristic_eliminate(instance: ManipulationInstance) -> ManipulationResult:
    """Earliest-eliminated candidate placed right after ``c``.

    Within a Nanson round (and for Borda, which is one round) lower scorers
    go higher, so under Borda this coincides with ``rev``.
    """
    return _iterative(instance, lambda s: (s.c, *_elim_order(s)), "elim")


def heuristic_rev_eliminate(instance: ManipulationInstance) -> ManipulationResult:
    """Exact reverse of :func:`heuristic_eliminate` below ``c``: earliest-eliminated last."""
    return _iterative(instance, lambda s: (s.c, *reversed(_elim_order(s))), "revelim")


# --- fit heuristics ----------------------------------------------------------

def _fit_scores(instance: ManipulationInstance, k: int, average: bool):
    """Deal ``k`` copies of each non-top Borda score to the non-preferred candidates."""
    m, c = instance.base.m, instance.preferred
    t = instance.base.tally
    rank = _kernels.tie_rank(m, c)
    load = [int(x) for x in t.counts.sum(axis=1)]
    step = t.scale
    target = load[c] + k * (m - 1) * step
    others = [d for d in range(m) if d != c]
    assigned = {d: [] for d in others}
    for value in range(m - 2, -1, -1):
        for _ in range(k):
            open_ = [d for d in others if len(assigned[d]) < k]
            if average:
                best = open_[0]
                for d in open_[1:]:
                    # larger gap per free slot wins; then fewer scores; then tie-break disfavour
                    lhs = (target - load[d]) * (k - len(assigned[best]))
                    rhs = (target - load[best]) * (k - len(assigned[d]))
                    if (lhs, -len(assigned[d]), rank[d]) > (rhs, -len(assigned[best]), rank[best]):
                        best = d
            else:
                best = min(open_, key=lambda d: (load[d], -rank[d]))
            assigned[best].append(value)
            load[best] += value * step
    return assigned


def scores_to_ballots(assigned: dict[int, Sequence[int]], k: int, preferred: int) -> list[tuple[int, ...]]:
    """Turn per-candidate Borda score multisets into ``k`` ballots with ``preferred`` on top.

    ``assigned[d]`` lists the scores (``0..m-2``) candidate ``d`` must get,
    one per ballot.  Each ballot is a perfect matching between candidates and
    score values in the remaining regular bipartite multigraph.
    """
    others = sorted(assigned)
    m = len(others) + 1
    if k == 0:
        return []
    mult = np.zeros((m - 1, m - 1), dtype=np.int64)  # candidate row x score value
    for row, d in enumerate(others):
        if len(assigned[d]) != k:
            raise ConstructionError(f"candidate {d} has {len(assigned[d])} scores, expected {k}")
        for v in assigned[d]:
            if not 0 <= v <= m - 2:
                raise ConstructionError(f"score {v} out of range for {m} candidates")
            mult[row, v] += 1
    if (mult.sum(axis=0) != k).any():
        raise ConstructionError("each score value must be used exactly k times")
    ballots = []
    for _ in range(k):
        rows, cols = linear_sum_assignment((mult == 0).astype(np.int64))
        if (mult[rows, cols] == 0).any():
            raise ConstructionError("no perfect matching left")
        mult[rows, cols] -= 1
        ballot = [preferred] + [0] * (m - 1)
        for row, v in zip(rows, cols):
            ballot[m - 1 - v] = others[row]
        ballots.append(tuple(ballot))
    return ballots


def _fit(instance: ManipulationInstance, k: int, average: bool) -> ManipulationResult:
    if k < 1:
        raise ValueError("fit heuristics need k >= 1")
    assigned = _fit_scores(instance, k, average)
    ballots = scores_to_ballots(assigned, k, instance.preferred)
    state = _State(instance)
    for b in ballots:
        state.add(b)
    return _result(instance, ballots, state.wins())


def heuristic_largest_fit(instance: ManipulationInstance, k: int) -> ManipulationResult:
    return _fit(instance, k, average=False)


def heuristic_average_fit(instance: ManipulationInstance, k: int) -> ManipulationResult:
    return _fit(instance, k, average=True)


# --- minimisation --------------------------------------------------------------

def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def lower_bound(instance: ManipulationInstance) -> int:
    """A number of unit manipulators below which ``c`` provably cannot win.

    * all rules: ``c`` must not end up a Condorcet loser;
    * Borda: ``c`` must reach every other Borda score;
    * Nanson: ``c`` must not fall below the first-round average;
    * Baldwin: ``c`` must reach the lowest first-round score.
    """
    t = instance.base.tally
    m, c, s = instance.base.m, instance.preferred, t.scale
    if m == 1:
        return 0
    counts = t.counts
    scores = [int(x) for x in counts.sum(axis=1)]
    others = [d for d in range(m) if d != c]
    gaps = [int(counts[d, c] - counts[c, d]) for d in others]
    bound = max(0, _ceil_div(min(gaps), s))
    top = s * (m - 1)
    if instance.rule == BORDA:
        bound = max(bound, _ceil_div(max(scores[d] for d in others) - scores[c], top))
    elif instance.rule == NANSON:
        total = sum(scores)
        bound = max(bound, _ceil_div(total - m * scores[c], s * (m - 1) * m // 2) if m > 1 else 0)
    elif instance.rule == BALDWIN:
        bound = max(bound, _ceil_div(min(scores[d] for d in others) - scores[c], top))
    return max(bound, 0)


_FIT = {"lafit": heuristic_largest_fit, "avfit": heuristic_average_fit}
_ITER = {"rev": heuristic_reverse, "elim": heuristic_eliminate, "revelim": heuristic_rev_eliminate}


def minimize_manipulators(instance: ManipulationInstance, heuristic: str) -> ManipulationResult:
    """Fewest manipulators with which ``heuristic`` succeeds.

    Iterative heuristics already stop at their first success; fit heuristics
    are retried at ``k = lower_bound, lower_bound + 1, ...``.
    """
    if instance.weighted:
        raise ValueError("heuristics are defined for unweighted manipulators only")
    if heuristic in _ITER:
        return _ITER[heuristic](instance)
    if heuristic not in _FIT:
        raise ValueError(f"unknown heuristic {heuristic!r}; expected one of {HEURISTICS}")
    if evaluate(instance, []):
        return _result(instance, [], True)
    k = max(1, lower_bound(instance))
    cap = _iteration_cap(instance)
    limit = instance.budget if isinstance(instance.budget, int) else None
    while True:
        if limit is not None and k > limit:
            return _result(instance, [], False)
        if k > cap:
            raise IterationCapError(f"{heuristic} found no manipulation with up to {cap} voters")
        result = _FIT[heuristic](instance, k)
        if result.success:
            return result
        k += 1


def run_heuristic(instance: ManipulationInstance, heuristic: str) -> ManipulationResult:
    return minimize_manipulators(instance, heuristic)
