"""Reduction instances and the score identities they are built to satisfy.

* :func:`x3c_to_baldwin` turns an exact-3-cover instance into a
  single-manipulator Baldwin instance (candidates ``c, d, b, v1..vq,
  a1..at``) built from pairs of "gadget" ballots :func:`gadget_W`.
* :func:`partition_to_nanson` turns a PARTITION instance into a weighted
  Nanson instance on candidates ``a, b, c, p``.
* :func:`reverse_pathology_instance` builds the 7-candidate Baldwin family on
  which ``rev`` needs many more manipulators than necessary.

Copies of identical ballots are stored as one ballot whose weight is the
multiplicity; for unweighted manipulation this is the same election.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .manipulation import ManipulationInstance
from .profile import Ballot, Profile
from .rules import BALDWIN, NANSON

__all__ = [
    "X3CInstance", "PartitionInstance",
    "gadget_W", "gadget_R",
    "x3c_to_baldwin", "x3c_identities", "x3c_witness_vote", "x3c_solve_small",
    "partition_to_nanson", "partition_witness", "partition_solve", "partition_identities",
    "pathology_identities",
    "reverse_pathology_instance",
]


@dataclass(frozen=True)
class X3CInstance:
    """Ground set ``{0..q-1}`` and a family of 3-element subsets."""

    q: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        if self.q < 1:
            raise ValueError("q must be positive")
        for raw, s in zip(self.sets, sets):
            if len(s) != 3 or len(tuple(raw)) != 3:
                raise ValueError(f"{sorted(raw)} is not a 3-element set")
            if not s <= set(range(self.q)):
                raise ValueError(f"{sorted(s)} is not a subset of the ground set")
        if len(sets) < 2:
            raise ValueError("need at least two sets")
        object.__setattr__(self, "sets", sets)

    @property
    def t(self) -> int:
        return len(self.sets)

    @property
    def m(self) -> int:
        return self.q + self.t + 3

    @classmethod
    def from_dict(cls, data: dict) -> "X3CInstance":
        """``{"q": 6, "sets": [[1, 2, 3], ...]}`` with 1-based elements."""
        return cls(int(data["q"]), tuple(frozenset(int(v) - 1 for v in s) for s in data["sets"]))

    def to_dict(self) -> dict:
        return {"q": self.q, "sets": [sorted(v + 1 for v in s) for s in self.sets]}

    def is_cover(self, chosen: Sequence[int]) -> bool:
        picked = [self.sets[j] for j in chosen]
        union = set().union(*picked) if picked else set()
        return len(union) == 3 * len(picked) == self.q


@dataclass(frozen=True)
class PartitionInstance:
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if not values or any(v <= 0 for v in values):
            raise ValueError("PARTITION needs positive integers")
        if sum(values) % 2:
            raise ValueError(f"sum {sum(values)} is odd")
        object.__setattr__(self, "values", values)

    @property
    def K(self) -> int:
        return sum(self.values) // 2


def gadget_W(u: int, v: int, m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The ballot pair ``u > v > Others`` and ``rev(Others) > u > v``.

    ``Others`` lists the remaining candidates in index order.  Relative to
    any other candidate the pair gives ``u`` one extra Borda point and ``v``
    one point fewer.
    """
    if u == v:
        raise ValueError("gadget needs two distinct candidates")
    others = [e for e in range(m) if e not in (u, v)]
    return (u, v, *others), (*reversed(others), u, v)


def gadget_R(u: int, v: int, p: int, m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``u > v > Others > p`` and ``rev(Others) > u > v > p``."""
    if len({u, v, p}) != 3:
        raise ValueError("gadget needs three distinct candidates")
    others = [e for e in range(m) if e not in (u, v, p)]
    return (u, v, *others, p), (*reversed(others), u, v, p)


def _add_gadget(pool: Counter, pair, copies: int):
    if copies < 0:
        raise ValueError("negative gadget multiplicity")
    for order in pair:
        pool[order] += copies


def _x3c_layout(x3c: X3CInstance):
    c, d, b = 0, 1, 2
    v = [3 + i for i in range(x3c.q)]
    a = [3 + x3c.q + j for j in range(x3c.t)]
    names = ("c", "d", "b", *(f"v{i + 1}" for i in range(x3c.q)), *(f"a{j + 1}" for j in range(x3c.t)))
    return c, d, b, v, a, names


def _borda(pool: Counter, m: int) -> list[int]:
    scores = [0] * m
    for order, w in pool.items():
        for pos, e in enumerate(order):
            scores[e] += w * (m - 1 - pos)
    return scores


def x3c_to_baldwin(x3c: X3CInstance) -> ManipulationInstance:
    c, d, b, v, a, names = _x3c_layout(x3c)
    m = x3c.m
    p1: Counter = Counter()
    for j, s in enumerate(x3c.sets):
        for i in sorted(s):
            _add_gadget(p1, gadget_W(v[i], a[j], m), 2 * m)
    for i in range(x3c.q):
        _add_gadget(p1, gadget_W(b, v[i], m), m)
    _add_gadget(p1, gadget_W(b, c, m), m * (x3c.t + 6))

    # balancing part: multiplicities read off the measured first-part scores
    s1 = _borda(p1, m)
    pool = Counter(p1)
    for i in range(x3c.q):
        _add_gadget(pool, gadget_W(d, v[i], m), s1[v[i]] - s1[c] - m)
    for j in range(x3c.t):
        _add_gadget(pool, gadget_W(d, a[j], m), s1[a[j]] - s1[c] - 1)
    _add_gadget(pool, gadget_W(d, b, m), s1[b] - s1[c] - m * x3c.q)

    ballots = tuple(Ballot(order, w) for order, w in sorted(pool.items()) if w > 0)
    return ManipulationInstance(BALDWIN, Profile(names, ballots), c, 1)


def x3c_identities(instance: ManipulationInstance, x3c: X3CInstance) -> dict:
    """Score differences to ``c`` next to the values they must equal."""
    c, _, b, v, a, _ = _x3c_layout(x3c)
    m = x3c.m
    t = instance.base.tally
    scores = [int(s) // t.scale for s in t.counts.sum(axis=1)]
    checks = {}
    for i, vi in enumerate(v):
        checks[f"s(v{i + 1})-s(c)"] = (scores[vi] - scores[c], m)
    for j, aj in enumerate(a):
        checks[f"s(a{j + 1})-s(c)"] = (scores[aj] - scores[c], 1)
    checks["s(b)-s(c)"] = (scores[b] - scores[c], m * x3c.q)
    return checks


def x3c_witness_vote(x3c: X3CInstance, cover: Sequence[int]) -> tuple[int, ...]:
    """``c > d > (unused a's) > b > v1..vq > (cover a's)`` for an exact cover."""
    cover = list(cover)
    if not x3c.is_cover(cover):
        raise ValueError(f"{[j + 1 for j in cover]} is not an exact cover")
    c, d, b, v, a, _ = _x3c_layout(x3c)
    unused = [a[j] for j in range(x3c.t) if j not in cover]
    return (c, d, *unused, b, *v, *(a[j] for j in cover))


def x3c_solve_small(x3c: X3CInstance) -> tuple[int, ...] | None:
    """Exact cover by exhaustive search over ``q/3``-subsets of the sets."""
    if x3c.q % 3:
        return None
    for chosen in itertools.combinations(range(x3c.t), x3c.q // 3):
        if x3c.is_cover(chosen):
            return chosen
    return None


# --- PARTITION -> weighted Nanson ----------------------------------------------

_A, _B, _C, _P = range(4)


def partition_to_nanson(partition: PartitionInstance) -> ManipulationInstance:
    K = partition.K
    a, b, c, p = _A, _B, _C, _P
    votes = [
        ((b, p, c, a), 2 * K + 1),
        ((a, c, b, p), 2 * K + 1),
        ((c, p, b, a), 2 * K + 1),
        ((a, b, c, p), 2 * K + 1),
        ((p, a, b, c), K + 2),
        ((c, b, p, a), K + 2),
        ((a, b, p, c), 1),
        ((c, p, a, b), 1),
        ((a, c, p, b), 1),
        ((b, p, a, c), 1),
    ]
    base = Profile(("a", "b", "c", "p"), tuple(Ballot(o, w) for o, w in votes))
    return ManipulationInstance(NANSON, base, p, tuple(Fraction(k) for k in partition.values))


def partition_solve(partition: PartitionInstance) -> tuple[int, ...] | None:
    """Indices of a subset summing to K, by exhaustive search."""
    vals = partition.values
    for r in range(len(vals) + 1):
        for chosen in itertools.combinations(range(len(vals)), r):
            if sum(vals[i] for i in chosen) == partition.K:
                return chosen
    return None


def partition_witness(partition: PartitionInstance, half: Sequence[int]) -> list[tuple[int, ...]]:
    """Ballots: ``p > a > b > c`` for members of ``half``, ``p > a > c > b`` otherwise."""
    half = set(half)
    if sum(partition.values[i] for i in half) != partition.K:
        raise ValueError("the chosen half does not sum to K")
    return [(_P, _A, _B, _C) if i in half else (_P, _A, _C, _B) for i in range(len(partition.values))]


# --- Reverse pathology -----------------------------------------------------------

def reverse_pathology_instance(n: int) -> ManipulationInstance:
    """Baldwin election over ``a..f, p`` with ``42n`` non-manipulator votes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    a, b, c, d, e, f, p = range(7)
    pool: Counter = Counter()
    for u, v in ((a, b), (b, c), (c, d), (d, e), (e, f)):
        _add_gadget(pool, gadget_R(u, v, p, 7), 3 * n)
    others = [b, c, d, e, f]
    pool[(p, a, *others)] += 6 * n
    pool[(*reversed(others), p, a)] += 6 * n
    ballots = tuple(Ballot(o, w) for o, w in sorted(pool.items()))
    return ManipulationInstance(BALDWIN, Profile(tuple("abcdefp"), ballots), p, None)


def _plain_scores(instance: ManipulationInstance) -> list[Fraction]:
    t = instance.base.tally
    return [Fraction(int(s), t.scale) for s in t.counts.sum(axis=1)]


def partition_identities(instance: ManipulationInstance, partition: PartitionInstance) -> dict:
    K = partition.K
    s = _plain_scores(instance)
    return {
        "s(a)": (s[_A], 14 * K + 18),
        "s(b)": (s[_B], 17 * K + 18),
        "s(c)": (s[_C], 17 * K + 18),
        "s(p)": (s[_P], 12 * K + 18),
    }


def pathology_identities(instance: ManipulationInstance, n: int) -> dict:
    s = _plain_scores(instance)
    out = {f"s({x})": (s[i], 138 * n) for i, x in ((0, "a"), (5, "f"))}
    out.update({f"s({x})": (s[i], 141 * n) for i, x in ((1, "b"), (2, "c"), (3, "d"), (4, "e"))})
    out["s(p)"] = (s[6], 42 * n)
    return dict(sorted(out.items()))
