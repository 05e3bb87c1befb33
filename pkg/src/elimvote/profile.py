"""Candidates, ballots and weighted profiles.

Candidates are addressed by index ``0..m-1`` and the index order doubles as
the fixed tie-break order ``c1 > c2 > ... > cm``.  Ballots are rankings
(tuples of candidate indices, most preferred first) carrying a positive
rational weight; unweighted voters have weight 1, and ``w`` identical unit
voters may equivalently be stored as one ballot of weight ``w``.

All arithmetic is exact.  Rational weights are scaled to integers by their
common denominator before any score is summed (see :func:`tally`).
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Ballot",
    "Profile",
    "ProfileError",
    "ParseError",
    "Tally",
    "tally",
    "positional_scores",
    "borda_scores",
    "restrict",
    "pairwise_majority",
    "condorcet_winner",
    "condorcet_loser",
    "parse_profile",
    "serialize_profile",
    "format_ranking",
]

_NAME = re.compile(r"^[^\s,>:#]+$")
_INT64_SAFE = 2**62


class ProfileError(ValueError):
    """Raised for structurally invalid candidates, ballots or profiles."""


class ParseError(ProfileError):
    """Raised by :func:`parse_profile`; carries the offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _as_weight(w) -> Fraction:
    if isinstance(w, float):
        raise ProfileError("weights must be exact (int, Fraction or 'p/q'), not float")
    if not isinstance(w, (Rational, str)):
        raise ProfileError(f"bad weight {w!r}")
    w = Fraction(w)
    if w <= 0:
        raise ProfileError(f"weight must be positive, got {w}")
    return w


@dataclass(frozen=True, order=True)
class Ballot:
    """A linear order over all candidates plus a positive weight."""

    order: tuple[int, ...]
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(c) for c in self.order))
        object.__setattr__(self, "weight", _as_weight(self.weight))
        if sorted(self.order) != list(range(len(self.order))):
            raise ProfileError(f"ranking {self.order} is not a permutation")


@dataclass(frozen=True, eq=False)
class Profile:
    """Candidate names (in tie-break order) and a multiset of weighted ballots.

    Equality is multiset equality over ballots.
    """

    candidates: tuple[str, ...]
    ballots: tuple[Ballot, ...] = field(default=())

    def __post_init__(self):
        names = tuple(str(c) for c in self.candidates)
        if not names:
            raise ProfileError("a profile needs at least one candidate")
        if len(set(names)) != len(names):
            raise ProfileError(f"duplicate candidate names in {names}")
        for name in names:
            if not _NAME.match(name):
                raise ProfileError(f"invalid candidate name {name!r}")
        object.__setattr__(self, "candidates", names)
        ballots = tuple(b if isinstance(b, Ballot) else Ballot(*b) for b in self.ballots)
        for b in ballots:
            if len(b.order) != len(names):
                raise ProfileError(
                    f"ballot {b.order} ranks {len(b.order)} candidates, expected {len(names)}"
                )
        object.__setattr__(self, "ballots", ballots)

    @classmethod
    def from_rankings(
        cls,
        candidates: Sequence[str],
        rankings: Iterable[Sequence],
        weights: Iterable | None = None,
    ) -> "Profile":
        """Build a profile from rankings given as names or indices.

        >>> Profile.from_rankings("abc", ["abc", "cba"]).n
        2
        """
        candidates = tuple(candidates)
        index = {name: i for i, name in enumerate(candidates)}
        rankings = [tuple(index[c] if isinstance(c, str) else c for c in r) for r in rankings]
        if weights is None:
            weights = [1] * len(rankings)
        weights = list(weights)
        if len(weights) != len(rankings):
            raise ProfileError("one weight per ranking required")
        return cls(candidates, tuple(Ballot(r, w) for r, w in zip(rankings, weights)))

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.ballots)

    @property
    def total_weight(self) -> Fraction:
        return sum((b.weight for b in self.ballots), Fraction(0))

    def index(self, name: str | int) -> int:
        """Candidate index for a name (indices pass through after a range check)."""
        if isinstance(name, (int, np.integer)):
            if not 0 <= name < self.m:
                raise ProfileError(f"candidate index {name} out of range")
            return int(name)
        try:
            return self.candidates.index(name)
        except ValueError:
            raise ProfileError(f"unknown candidate {name!r}") from None

    def with_ballots(self, orders: Iterable[Sequence[int]], weights: Iterable | None = None) -> "Profile":
        """Return a new profile with extra ballots appended."""
        orders = list(orders)
        weights = [1] * len(orders) if weights is None else list(weights)
        extra = tuple(Ballot(o, w) for o, w in zip(orders, weights, strict=True))
        return Profile(self.candidates, self.ballots + extra)

    def _key(self):
        return (self.candidates, tuple(sorted(self.ballots)))

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @cached_property
    def tally(self) -> "Tally":
        return _build_tally(self)


@dataclass(frozen=True)
class Tally:
    """Integer pairwise-preference matrix of a profile.

    ``counts[i, j]`` is ``scale`` times the total weight of ballots ranking
    ``i`` above ``j``, where ``scale`` is the common denominator of all
    weights.  The Borda score of ``i`` among a surviving set ``S`` is then
    ``counts[i, S].sum() / scale``; every elimination rule here only ever
    needs this matrix.
    """

    counts: np.ndarray
    scale: int


def _build_tally(profile: Profile) -> Tally:
    m = profile.m
    scale = math.lcm(*(b.weight.denominator for b in profile.ballots)) if profile.ballots else 1
    ints = [int(b.weight * scale) for b in profile.ballots]
    big = sum(ints) >= _INT64_SAFE
    counts = np.zeros((m, m), dtype=object if big else np.int64)
    if profile.ballots:
        pos = np.empty((len(ints), m), dtype=np.int64)
        for row, b in enumerate(profile.ballots):
            pos[row, list(b.order)] = np.arange(m)
        above = pos[:, :, None] < pos[:, None, :]
        if big:
            for w, a in zip(ints, above):
                counts += w * a.astype(object)
        else:
            counts = np.einsum("b,bij->ij", np.array(ints, dtype=np.int64), above.astype(np.int64))
    counts.setflags(write=False)
    return Tally(counts, scale)


def tally(profile: Profile) -> Tally:
    return profile.tally


def positional_scores(profile: Profile, vec: Sequence[int]) -> dict[int, Fraction]:
    """Weighted positional score of every candidate under scoring vector ``vec``."""
    vec = [int(v) for v in vec]
    if len(vec) != profile.m:
        raise ProfileError(f"scoring vector has length {len(vec)}, profile has {profile.m} candidates")
    if any(a <= b for a, b in zip(vec, vec[1:])):
        raise ProfileError("scoring vector must be strictly decreasing")
    scores = {c: Fraction(0) for c in range(profile.m)}
    for b in profile.ballots:
        for rank, c in enumerate(b.order):
            scores[c] += b.weight * vec[rank]
    return scores


def borda_scores(profile: Profile) -> dict[int, Fraction]:
    t = profile.tally
    return {c: Fraction(int(s), t.scale) for c, s in enumerate(t.counts.sum(axis=1))}


def restrict(profile: Profile, survivors: Iterable[int | str]) -> Profile:
    """Drop every candidate not in ``survivors``.

    Surviving candidates keep their relative (tie-break) order and are
    re-indexed ``0..len(survivors)-1``; ballots keep their relative order
    and weight.
    """
    keep = sorted({profile.index(c) for c in survivors})
    if not keep:
        raise ProfileError("cannot restrict to an empty candidate set")
    remap = {old: new for new, old in enumerate(keep)}
    ballots = tuple(
        Ballot(tuple(remap[c] for c in b.order if c in remap), b.weight) for b in profile.ballots
    )
    return Profile(tuple(profile.candidates[i] for i in keep), ballots)


def pairwise_majority(profile: Profile) -> np.ndarray:
    """Antisymmetric matrix of weighted margins (as Fractions, object dtype)."""
    t = profile.tally
    diff = t.counts - t.counts.T
    out = np.empty(diff.shape, dtype=object)
    for idx, v in np.ndenumerate(diff):
        out[idx] = Fraction(int(v), t.scale)
    return out


def condorcet_winner(profile: Profile) -> int | None:
    margins = profile.tally.counts - profile.tally.counts.T
    for c in range(profile.m):
        if all(margins[c, d] > 0 for d in range(profile.m) if d != c):
            return c
    return None


def condorcet_loser(profile: Profile) -> int | None:
    margins = profile.tally.counts - profile.tally.counts.T
    for c in range(profile.m):
        if all(margins[c, d] < 0 for d in range(profile.m) if d != c):
            return c
    return None


# --- text format -----------------------------------------------------------

def format_ranking(candidates: Sequence[str], order: Sequence[int]) -> str:
    return ">".join(candidates[c] for c in order)


def _format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def serialize_profile(profile: Profile) -> str:
    lines = ["candidates: " + ",".join(profile.candidates)]
    lines += [f"{_format_weight(b.weight)}: {format_ranking(profile.candidates, b.order)}"
              for b in profile.ballots]
    return "\n".join(lines) + "\n"


_WEIGHT = re.compile(r"^[0-9]+(/[0-9]+)?$")


def parse_profile(text: str) -> Profile:
    """Parse the line-oriented profile format.

    The first content line is ``candidates: a,b,c`` (tie-break order); every
    further non-empty line is ``<weight>: a>b>c`` with an integer or ``p/q``
    weight.  ``#`` starts a comment.
    """
    candidates: tuple[str, ...] | None = None
    index: Mapping[str, int] = {}
    ballots = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError(lineno, f"expected '<key>: <value>', got {raw!r}")
        head, body = head.strip(), body.strip()
        if candidates is None:
            if head != "candidates":
                raise ParseError(lineno, "first line must be 'candidates: ...'")
            names = tuple(s.strip() for s in body.split(","))
            try:
                Profile(names)
            except ProfileError as exc:
                raise ParseError(lineno, str(exc)) from None
            candidates = names
            index = {c: i for i, c in enumerate(names)}
            continue
        if not _WEIGHT.match(head):
            raise ParseError(lineno, f"bad weight {head!r}")
        weight = Fraction(head)
        if weight <= 0:
            raise ParseError(lineno, "weight must be positive")
        names = [s.strip() for s in body.split(">")]
        unknown = [s for s in names if s not in index]
        if unknown:
            raise ParseError(lineno, f"unknown candidate {unknown[0]!r}")
        order = tuple(index[s] for s in names)
        if len(order) != len(candidates) or len(set(order)) != len(order):
            raise ParseError(lineno, "ranking is not a permutation of the candidates")
        ballots.append(Ballot(order, weight))
    if candidates is None:
        raise ParseError(0, "missing 'candidates:' line")
    return Profile(candidates, tuple(ballots))


def multiset(profile: Profile) -> Counter:
    """Ballot multiset with multiplicities folded into weights."""
    out: Counter = Counter()
    for b in profile.ballots:
        out[b.order] += b.weight
    return out
