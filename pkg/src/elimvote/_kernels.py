"""Rule evaluation on integer pairwise matrices.

Everything here works on ``counts[i, j]`` (scaled weight of ballots ranking i
above j) and a tie-break ``rank`` array where ``rank[c]`` is c's position in
the effective tie-break order (0 = most favoured).  The Borda score of i
among survivors S is ``counts[i, S].sum()``.
"""

from __future__ import annotations

import numpy as np

BORDA, NANSON, BALDWIN = "borda", "nanson", "baldwin"
RULES = (BORDA, NANSON, BALDWIN)


def tie_rank(m: int, favored: int | None = None) -> np.ndarray:
    order = list(range(m))
    if favored is not None:
        order.remove(favored)
        order.insert(0, favored)
    rank = np.empty(m, dtype=np.int64)
    rank[order] = np.arange(m)
    return rank


def run(rule: str, counts: np.ndarray, rank: np.ndarray):
    """Evaluate ``rule`` once.

    Returns ``(winner, rounds)`` with rounds a list of
    ``(survivors, scores, eliminated)`` tuples; ``scores`` aligns with
    ``survivors``.
    """
    if rule == BALDWIN:
        return _baldwin(counts, rank)
    if rule == NANSON:
        return _nanson(counts, rank)
    if rule == BORDA:
        return _borda(counts, rank)
    raise ValueError(f"unknown rule {rule!r}")


def _borda(counts, rank):
    m = counts.shape[0]
    scores = counts.sum(axis=1)
    best = max(range(m), key=lambda c: (scores[c], -rank[c]))
    alive = tuple(range(m))
    return best, [(alive, scores, tuple(c for c in alive if c != best))]


def _baldwin(counts, rank):
    alive = list(range(counts.shape[0]))
    rounds = []
    while len(alive) > 1:
        scores = counts[np.ix_(alive, alive)].sum(axis=1)
        low = scores.min()
        # among the lowest, drop the one the tie-break favours least
        loser = max((c for c, s in zip(alive, scores) if s == low), key=lambda c: rank[c])
        rounds.append((tuple(alive), scores, (loser,)))
        alive.remove(loser)
    return alive[0], rounds


def _nanson(counts, rank):
    alive = list(range(counts.shape[0]))
    rounds = []
    while len(alive) > 1:
        scores = counts[np.ix_(alive, alive)].sum(axis=1)
        total, k = scores.sum(), len(alive)
        out = tuple(c for c, s in zip(alive, scores) if s * k < total)
        rounds.append((tuple(alive), scores, out))
        if not out:
            break
        alive = [c for c in alive if c not in out]
    return min(alive, key=lambda c: rank[c]), rounds


def winner(rule: str, counts: np.ndarray, rank: np.ndarray) -> int:
    return run(rule, counts, rank)[0]


def elimination_groups(rule: str, counts: np.ndarray, rank: np.ndarray):
    """Groups of candidates in elimination order, earliest first.

    Each group is sorted by (score that round, tie-break disfavour), lowest
    first.  The final survivors form the last group; Borda is treated as a
    single round in which everyone is scored together.
    """
    win, rounds = run(rule, counts, rank)
    if rule == BORDA:
        alive, scores, _ = rounds[0]
        return [sorted(alive, key=lambda c: (scores[c], -rank[c]))], win
    groups = []
    eliminated = set()
    for alive, scores, out in rounds:
        by = dict(zip(alive, scores))
        if out:
            groups.append(sorted(out, key=lambda c: (by[c], -rank[c])))
            eliminated.update(out)
    alive, scores, _ = rounds[-1] if rounds else ((win,), [0], ())
    by = dict(zip(alive, scores))
    last = [c for c in alive if c not in eliminated]
    groups.append(sorted(last, key=lambda c: (by[c], -rank[c])))
    return groups, win


# --- batched evaluation ------------------------------------------------------

def wins_batch(rule: str, counts: np.ndarray, rank: np.ndarray, target: int) -> np.ndarray:
    """Boolean mask of matrices in ``counts`` (shape B x m x m) electing ``target``."""
    B, m, _ = counts.shape
    if rule == BORDA:
        scores = counts.sum(axis=2)
        st = scores[:, target][:, None]
        better = (scores > st) | ((scores == st) & (rank < rank[target])[None, :])
        return ~better.any(axis=1)
    alive = np.ones((B, m), dtype=counts.dtype)
    rows = np.arange(B)
    if rule == BALDWIN:
        disfavour = (m - 1 - rank)[None, :]
        big = np.iinfo(np.int64).max
        for _ in range(m - 1):
            scores = np.einsum("bij,bj->bi", counts, alive).astype(np.int64)
            key = np.where(alive > 0, scores * m + disfavour, big)
            alive[rows, key.argmin(axis=1)] = 0
        return alive[:, target] > 0
    if rule == NANSON:
        for _ in range(m - 1):
            scores = np.einsum("bij,bj->bi", counts, alive).astype(np.int64)
            k = alive.sum(axis=1, dtype=np.int64)[:, None]
            total = (scores * alive).sum(axis=1)[:, None]
            below = (alive > 0) & (scores * k < total)
            alive[below] = 0
        preferred = (alive > 0) & (rank < rank[target])[None, :]
        return (alive[:, target] > 0) & ~preferred.any(axis=1)
    raise ValueError(f"unknown rule {rule!r}")
