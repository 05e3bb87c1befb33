"""Borda, Baldwin and Nanson winners with full elimination traces.

Tie-breaking follows a :class:`TieBreak` policy.  The default is the fixed
index order; ``TieBreak(favored=c)`` moves ``c`` to the front of that order,
which is how manipulation problems break ties in favour of the coalition.

* Borda: the highest score wins, ties to the tie-break-preferred candidate.
* Baldwin: one candidate is dropped per round, the lowest scorer; among
  several lowest scorers the one *last* in the tie-break order goes.
* Nanson: every candidate strictly below the average score is dropped.  If
  nobody is below average (all survivors tied) the tie-break-preferred
  survivor wins.

>>> from elimvote.profile import Profile
>>> p = Profile.from_rankings("abc", ["abc"] * 3 + ["bca"] * 2)
>>> borda_winner(p), baldwin_winner(p)[0], nanson_winner(p)[0]
(1, 0, 0)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from ._kernels import BALDWIN, BORDA, NANSON, RULES
from .profile import Ballot, Profile

__all__ = [
    "BORDA", "NANSON", "BALDWIN", "RULES",
    "TieBreak", "FIXED", "Round", "EliminationTrace",
    "borda_winner", "baldwin_winner", "nanson_winner", "elect", "reversal",
]


@dataclass(frozen=True)
class TieBreak:
    favored: int | None = None

    def rank(self, m: int):
        return _kernels.tie_rank(m, self.favored)


FIXED = TieBreak()


@dataclass(frozen=True)
class Round:
    survivors: tuple[int, ...]
    scores: dict[int, Fraction]
    average: Fraction
    eliminated: tuple[int, ...]


@dataclass(frozen=True)
class EliminationTrace:
    rule: str
    candidates: tuple[str, ...]
    rounds: tuple[Round, ...]
    winner: int

    def to_dict(self) -> dict:
        names = self.candidates
        return {
            "rule": self.rule,
            "winner": names[self.winner],
            "rounds": [
                {
                    "survivors": [names[c] for c in r.survivors],
                    "scores": {names[c]: str(s) for c, s in r.scores.items()},
                    "average": str(r.average),
                    "eliminated": [names[c] for c in r.eliminated],
                }
                for r in self.rounds
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @property
    def eliminated(self) -> list[int]:
        return [c for r in self.rounds for c in r.eliminated]


def _trace(rule, candidates, raw_rounds, winner, scale) -> EliminationTrace:
    rounds = []
    for alive, scores, out in raw_rounds:
        table = {c: Fraction(int(s), scale) for c, s in zip(alive, scores)}
        rounds.append(Round(alive, table, sum(table.values()) / len(alive), out))
    return EliminationTrace(rule, candidates, tuple(rounds), winner)


def elect(rule: str, profile: Profile, policy: TieBreak = FIXED) -> tuple[int, EliminationTrace]:
    """Winner and trace of ``profile`` under ``rule`` (one of :data:`RULES`)."""
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
    t = profile.tally
    win, raw = _kernels.run(rule, t.counts, policy.rank(profile.m))
    return win, _trace(rule, profile.candidates, raw, win, t.scale)


def borda_winner(profile: Profile, policy: TieBreak = FIXED) -> int:
    return elect(BORDA, profile, policy)[0]


def baldwin_winner(profile: Profile, policy: TieBreak = FIXED) -> tuple[int, EliminationTrace]:
    return elect(BALDWIN, profile, policy)


def nanson_winner(profile: Profile, policy: TieBreak = FIXED) -> tuple[int, EliminationTrace]:
    return elect(NANSON, profile, policy)


def reversal(profile: Profile) -> Profile:
    """Every ballot turned upside down, weights kept."""
    return Profile(profile.candidates,
                   tuple(Ballot(b.order[::-1], b.weight) for b in profile.ballots))
