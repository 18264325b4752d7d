"""Stack-distance cache model: reuse histogram to hit rate.

A reuse at stack distance D hits a set-associative cache when fewer
than A of the D distinct intervening blocks map to the reused block's
set. With blocks spread uniformly over S sets that count is binomial,
so P(hit | D) = sum over a < A of C(D, a) (1/S)^a (1 - 1/S)^(D - a).
The whole-histogram hit rate weights these conditionals by bin
frequency; cold misses contribute zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyHistogram, InvalidConfig
from .profile import ReuseHistogram


@dataclass(frozen=True)
class CacheConfig:
    """Cache geometry. ``sets`` is capacity / (associativity * line)."""

    capacity: int
    associativity: int
    line_size: int

    def __post_init__(self):
        if self.capacity <= 0 or self.associativity <= 0 or self.line_size <= 0:
            raise InvalidConfig("capacity, associativity and line size must be positive")
        if self.capacity % (self.associativity * self.line_size):
            raise InvalidConfig(
                f"capacity {self.capacity} is not a multiple of "
                f"{self.associativity} ways x {self.line_size}B lines"
            )

    @property
    def sets(self) -> int:
        return self.capacity // (self.associativity * self.line_size)


def hit_probability(distance: int, config: CacheConfig) -> float:
    """Conditional hit probability for one reuse distance.

    Terms are accumulated with the binomial recurrence, so distances up
    to 10**9 stay finite (deep tails underflow to zero, which is within
    the documented 1e-12 tolerance).
    """
    if distance < -1:
        raise ValueError(f"reuse distance {distance} below the cold-miss sentinel")
    if distance == -1:
        return 0.0
    a_ways = config.associativity
    if distance < a_ways:
        return 1.0
    sets = config.sets
    if sets == 1:
        return 0.0  # distance >= associativity fills the single set
    q = 1.0 / sets
    ratio = q / (1.0 - q)
    term = (1.0 - q) ** distance
    terms = [term]
    for a in range(1, a_ways):
        term *= (distance - a + 1) / a * ratio
        terms.append(term)
    total = math.fsum(terms)
    # roundoff in the recurrence can leave a sum one ulp under 1.0 where
    # the true miss mass is far below the documented 1e-12 tolerance;
    # snap those so the probability stays monotone in the distance
    if total >= 1.0 - 1e-12:
        return 1.0
    return total


def hit_rate(histogram: ReuseHistogram, config: CacheConfig) -> float:
    """Expected hit probability over a whole reuse histogram."""
    total = histogram.total
    if total <= 0:
        raise EmptyHistogram("hit rate of an empty histogram is undefined")
    weighted = math.fsum(
        freq * hit_probability(d, config) for d, freq in histogram.bins.items()
    )
    return weighted / total
