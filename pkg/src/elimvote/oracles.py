"""Exact manipulation oracles.

Every rule here depends on the ballots only through the pairwise-preference
matrix, so the outcome of adding a coalition is a function of the *sum* of
its members' pairwise matrices.  The unweighted search therefore walks the
distinct sums reachable with ``1, 2, ...`` unit ballots (each level is the
previous level plus every one of the ``m!`` orders, deduplicated), which
enumerates every multiset of orders while evaluating each aggregate once.
Levels depend only on ``m`` and are cached.  Nothing assumes the preferred
candidate is ranked first.

The weighted search does the same, level ``i`` adding manipulator ``i`` with
its own weight, and only the final level is evaluated.
"""

from __future__ import annotations

import itertools
import math
import time
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from ._kernels import NANSON
from .manipulation import ManipulationInstance, ManipulationResult, _result, evaluate

__all__ = [
    "OracleTimeout",
    "brute_force_optimal_unweighted",
    "brute_force_weighted",
    "nanson_weighted_3cand",
    "all_orders",
]

CHUNK = 1 << 17


class OracleTimeout(RuntimeError):
    pass


@lru_cache(maxsize=None)
def all_orders(m: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(m))), dtype=np.int8).reshape(-1, m)


@lru_cache(maxsize=None)
def _pairs(m: int):
    return np.triu_indices(m, k=1)


@lru_cache(maxsize=None)
def _order_bits(m: int) -> np.ndarray:
    """Upper-triangle pairwise indicators of every order, shape (m!, m(m-1)/2)."""
    orders = all_orders(m).astype(np.int64)
    pos = np.empty_like(orders)
    rows = np.arange(len(orders))[:, None]
    pos[rows, orders] = np.arange(m)
    i, j = _pairs(m)
    return (pos[:, i] < pos[:, j]).astype(np.int16)


def _full(upper: np.ndarray, total, m: int) -> np.ndarray:
    """Rebuild (B, m, m) pairwise matrices from upper triangles and per-row totals."""
    i, j = _pairs(m)
    out = np.zeros((len(upper), m, m), dtype=np.int64)
    out[:, i, j] = upper
    out[:, j, i] = np.asarray(total)[..., None] - upper
    return out


class _Levels:
    """Distinct pairwise sums of k unit ballots, k = 1, 2, ..., built lazily.

    Sums are packed into int64 keys, ``DIGIT`` bits per candidate pair.
    Counts never exceed k, so packing is additive and each level is the
    previous level's keys plus every order's key.  When the pairs do not fit
    in 63 bits only levels 0 and 1 are available.
    """

    DIGIT = 4
    MERGE = 1 << 22

    def __init__(self, m: int):
        self.m = m
        bits = _order_bits(m).astype(np.int64)
        self.width = bits.shape[1]
        self.packable = self.width * self.DIGIT <= 63
        self.shifts = np.arange(self.width, dtype=np.int64) * self.DIGIT
        self.order_keys = (bits << self.shifts).sum(axis=1) if self.packable else None
        self.keys = [np.zeros(1, dtype=np.int64)]
        self.parent = [None]
        self.order = [None]
        if self.packable:
            self.keys.append(self.order_keys.copy())
            self.parent.append(np.zeros(len(bits), dtype=np.int64))
            self.order.append(np.arange(len(bits), dtype=np.int64))

    @property
    def max_level(self) -> int:
        return (1 << self.DIGIT) - 1 if self.packable else 1

    def size(self, k: int) -> int:
        if k == 1 and not self.packable:
            return len(_order_bits(self.m))
        return len(self.keys[k])

    def upper(self, k: int, start: int, stop: int) -> np.ndarray:
        """Upper-triangle counts for rows ``start:stop`` of level ``k``."""
        if k == 1 and not self.packable:
            return _order_bits(self.m)[start:stop]
        keys = self.keys[k][start:stop]
        return ((keys[:, None] >> self.shifts) & ((1 << self.DIGIT) - 1)).astype(np.int16)

    def ensure(self, k: int, deadline: float | None = None):
        if k > self.max_level:
            raise ValueError(f"coalitions of {k} voters are beyond the packed search for m={self.m}")
        if not self.packable:
            return
        while len(self.keys) <= k:
            self._grow(deadline)

    def _grow(self, deadline):
        prev = self.keys[-1]
        nord = len(self.order_keys)
        step = max(1, self.MERGE // nord)
        acc_k = np.empty(0, dtype=np.int64)
        acc_p = np.empty(0, dtype=np.int64)
        acc_o = np.empty(0, dtype=np.int64)
        for start in range(0, len(prev), step):
            if deadline is not None and time.monotonic() > deadline:
                raise OracleTimeout(f"building level {len(self.keys)} for m={self.m}")
            block = prev[start:start + step]
            keys = (block[:, None] + self.order_keys[None, :]).ravel()
            keys, first = np.unique(keys, return_index=True)
            parent = start + first // nord
            order = first % nord
            # earlier blocks keep their representative
            merged, pick = np.unique(np.concatenate([acc_k, keys]), return_index=True)
            acc_p = np.concatenate([acc_p, parent])[pick]
            acc_o = np.concatenate([acc_o, order])[pick]
            acc_k = merged
        self.keys.append(acc_k)
        self.parent.append(acc_p)
        self.order.append(acc_o)

    def witness(self, k: int, idx: int) -> list[tuple[int, ...]]:
        orders = all_orders(self.m)
        if k == 1 and not self.packable:
            return [tuple(int(x) for x in orders[idx])]
        ballots = []
        while k > 0:
            ballots.append(tuple(int(x) for x in orders[self.order[k][idx]]))
            idx = int(self.parent[k][idx])
            k -= 1
        return ballots[::-1]


@lru_cache(maxsize=None)
def _levels(m: int) -> _Levels:
    return _Levels(m)


def _first_success(rule, base, scale, levels, k, rank, target, deadline):
    m = base.shape[0]
    size = levels.size(k)
    for start in range(0, size, CHUNK):
        if deadline is not None and time.monotonic() > deadline:
            raise OracleTimeout("evaluating candidate coalitions")
        upper = levels.upper(k, start, min(size, start + CHUNK))
        block = _full(upper, k, m) * scale + base
        hit = np.flatnonzero(_kernels.wins_batch(rule, block, rank, target))
        if len(hit):
            return start + int(hit[0])
    return None


def brute_force_optimal_unweighted(
    instance: ManipulationInstance,
    k_max: int,
    timeout: float | None = None,
) -> ManipulationResult | None:
    """Smallest number ``k <= k_max`` of unit manipulators that can make ``c`` win.

    Returns a successful result carrying a witness coalition, or ``None`` if
    no coalition of at most ``k_max`` voters works.  ``timeout`` (seconds)
    raises :class:`OracleTimeout` when exceeded.
    """
    deadline = None if timeout is None else time.monotonic() + timeout
    if evaluate(instance, []):
        return _result(instance, [], True)
    t = instance.base.tally
    m = instance.base.m
    if t.counts.dtype == object:
        raise ValueError("profile weights too large for the vectorised oracle")
    rank = _kernels.tie_rank(m, instance.preferred)
    levels = _levels(m)
    for k in range(1, k_max + 1):
        levels.ensure(k, deadline)
        hit = _first_success(instance.rule, t.counts, t.scale, levels, k, rank,
                             instance.preferred, deadline)
        if hit is not None:
            ballots = levels.witness(k, hit)
            return _result(instance, ballots, True)
    return None


def brute_force_weighted(instance: ManipulationInstance, timeout: float | None = None):
    """Exact feasibility of a weighted coalitional manipulation.

    Returns ``(feasible, result)``; ``result`` holds the witness ballots (one
    per manipulator, in budget order) when feasible.
    """
    if not instance.weighted:
        raise ValueError("brute_force_weighted needs a tuple of manipulator weights")
    deadline = None if timeout is None else time.monotonic() + timeout
    weights = instance.budget
    base = instance.base
    m = base.m
    if not weights:
        ok = evaluate(instance, [])
        return ok, (_result(instance, [], ok, ()) if ok else None)
    scale = math.lcm(base.tally.scale, *(w.denominator for w in weights))
    base_counts = base.tally.counts * (scale // base.tally.scale)
    ints = [int(w * scale) for w in weights]
    bits = _order_bits(m).astype(np.int64)
    width = bits.shape[1]

    sums = np.zeros((1, width), dtype=np.int64)
    parents, choices = [], []
    for w in ints:
        if deadline is not None and time.monotonic() > deadline:
            raise OracleTimeout("weighted search")
        cand = (sums[:, None, :] + w * bits[None, :, :]).reshape(-1, width)
        parent = np.repeat(np.arange(len(sums)), len(bits))
        order = np.tile(np.arange(len(bits)), len(sums))
        _, first = np.unique(cand, axis=0, return_index=True)
        sums, parents, choices = cand[first], parents + [parent[first]], choices + [order[first]]
    total = sum(ints)
    rank = _kernels.tie_rank(m, instance.preferred)
    block_rows = max(1, CHUNK // max(1, m * m))
    for start in range(0, len(sums), block_rows):
        block = _full(sums[start:start + block_rows], total, m) + base_counts
        hit = np.flatnonzero(_kernels.wins_batch(instance.rule, block, rank, instance.preferred))
        if len(hit):
            idx = start + int(hit[0])
            orders = all_orders(m)
            ballots = []
            for level in range(len(ints) - 1, -1, -1):
                ballots.append(tuple(int(x) for x in orders[choices[level][idx]]))
                idx = int(parents[level][idx])
            ballots.reverse()
            assert evaluate(instance, ballots)
            return True, _result(instance, ballots, True, weights)
    return False, None


def nanson_weighted_3cand(instance: ManipulationInstance):
    """Weighted Nanson manipulation with at most three candidates.

    It suffices to try the coalition voting unanimously ``p > a > b`` or
    unanimously ``p > b > a``.  Returns ``(feasible, result)``.
    """
    if instance.rule != NANSON:
        raise ValueError("this procedure is for Nanson's rule")
    m, p = instance.base.m, instance.preferred
    if m > 3:
        raise ValueError(f"at most 3 candidates supported, got {m}")
    weights = instance.budget if instance.weighted else (Fraction(1),) * (instance.budget or 0)
    others = [d for d in range(m) if d != p]
    tries = [tuple(others), tuple(reversed(others))] if m == 3 else [tuple(others)]
    for rest in tries:
        ballots = [(p, *rest)] * len(weights)
        if evaluate(instance, ballots, weights):
            return True, _result(instance, ballots, True, weights)
    return False, None
