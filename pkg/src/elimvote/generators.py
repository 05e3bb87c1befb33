"""Seeded random profiles: impartial culture and the Pólya–Eggenberger urn.

Randomness comes from numpy's PCG64 bit generator (``np.random.default_rng``)
seeded with the 64-bit ``seed`` of the :class:`GeneratorSpec`, so a spec maps
to the same profile on every platform.

The urn starts with one ball per linear order and every draw returns the
ball with ``a`` extra copies of it.  Rather than materialise ``m!`` balls,
draw ``k`` (0-based) copies one of the earlier draws with probability
``k*a / (m! + k*a)``, uniformly among them, and is otherwise a fresh uniform
order.  This is the same process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .profile import Ballot, Profile

__all__ = ["GeneratorSpec", "uniform_profile", "urn_profile", "generate", "candidate_names"]


def candidate_names(m: int) -> tuple[str, ...]:
    return tuple(f"c{i + 1}" for i in range(m))


@dataclass(frozen=True)
class GeneratorSpec:
    model: str
    m: int
    n: int
    seed: int
    urn_a: int | None = None

    def __post_init__(self):
        if self.model not in ("uniform", "urn"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.m < 2 or self.n < 1:
            raise ValueError("need m >= 2 and n >= 1")
        if self.urn_a is not None and self.urn_a < 0:
            raise ValueError("urn reinforcement must be non-negative")

    @property
    def a(self) -> int:
        return math.factorial(self.m) if self.urn_a is None else self.urn_a


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def uniform_orders(m: int, n: int, rng) -> list[tuple[int, ...]]:
    rng = _rng(rng)
    return [tuple(int(x) for x in rng.permutation(m)) for _ in range(n)]


def urn_orders(m: int, n: int, a: int, rng) -> list[tuple[int, ...]]:
    rng = _rng(rng)
    fact = math.factorial(m)
    drawn: list[tuple[int, ...]] = []
    for k in range(n):
        copy = float(Fraction(k * a, fact + k * a)) if k else 0.0
        if copy and rng.random() < copy:
            drawn.append(drawn[int(rng.integers(k))])
        else:
            drawn.append(tuple(int(x) for x in rng.permutation(m)))
    return drawn


def _profile(m, orders):
    return Profile(candidate_names(m), tuple(Ballot(o) for o in orders))


def uniform_profile(spec: GeneratorSpec, rng=None) -> Profile:
    return _profile(spec.m, uniform_orders(spec.m, spec.n, spec.seed if rng is None else rng))


def urn_profile(spec: GeneratorSpec, rng=None) -> Profile:
    return _profile(spec.m, urn_orders(spec.m, spec.n, spec.a, spec.seed if rng is None else rng))


def generate(spec: GeneratorSpec, rng=None) -> Profile:
    """Profile for ``spec``; pass ``rng`` to keep drawing from a shared stream."""
    if spec.model == "uniform":
        return uniform_profile(spec, rng)
    return urn_profile(spec, rng)
