"""Reuse-distance histograms and their reference computation.

The reuse distance of an access is the number of distinct symbols that
occur strictly between it and the previous access to the same symbol.
First-ever accesses (cold misses) get the sentinel distance -1.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass


@dataclass
class ReuseHistogram:
    """Map from reuse distance (-1 for cold misses) to frequency."""

    bins: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.bins.values())

    @property
    def cold_misses(self) -> int:
        return self.bins.get(-1, 0)

    def sorted_items(self) -> list[tuple[int, int]]:
        return sorted(self.bins.items())

    def to_text(self) -> str:
        """Text map with integer-string keys ascending, -1 first."""
        return json.dumps({str(d): f for d, f in self.sorted_items()})

    @classmethod
    def from_text(cls, text: str) -> "ReuseHistogram":
        raw = json.loads(text)
        return cls({int(d): int(f) for d, f in raw.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, ReuseHistogram):
            return self.bins == other.bins
        return NotImplemented


def _symbol_list(symbols) -> list:
    if hasattr(symbols, "symbols"):
        return symbols.symbols
    if isinstance(symbols, list):
        return symbols
    return list(symbols)


def compute_profile(symbols: Iterable[str]) -> ReuseHistogram:
    """Reuse histogram of a flattened trace, by direct window scan.

    For every repeated access the distinct symbols in the window
    between the two occurrences are collected into a set whose size is
    the distance. Quadratic in the worst case; ``oracle.exact_profile``
    computes the same histogram in O(n log n) and is kept bin-exact by
    property tests.
    """
    seq = _symbol_list(symbols)
    rf: dict[int, int] = {}
    last: dict[str, int] = {}
    cold = 0
    for index, item in enumerate(seq):
        prev = last.get(item)
        if prev is None:
            cold += 1
        else:
            distance = len(set(seq[prev + 1 : index]))
            rf[distance] = rf.get(distance, 0) + 1
        last[item] = index
    if cold:
        rf[-1] = cold
    return ReuseHistogram(rf)
