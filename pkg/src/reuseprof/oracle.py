"""Exact dynamic-equivalent reuse profiling and histogram comparison.

``exact_profile`` computes the same histogram as
``profile.compute_profile`` but in O(n log n): a last-access map plus a
binary indexed tree over positions where each currently-live symbol's
most recent access is flagged. Counting flags inside a window counts
exactly the distinct symbols occurring in it.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .profile import ReuseHistogram, _symbol_list


def exact_profile(symbols: Iterable[str]) -> ReuseHistogram:
    seq = _symbol_list(symbols)
    n = len(seq)
    tree = [0] * (n + 1)
    last: dict[str, int] = {}
    rf: dict[int, int] = {}
    cold = 0
    get = last.get
    for i, item in enumerate(seq):
        prev = get(item)
        if prev is None:
            cold += 1
        else:
            # flags in positions (prev, i) exclusive, 1-based prefix sums
            d = 0
            j = i
            while j:
                d += tree[j]
                j -= j & -j
            j = prev + 1
            while j:
                d -= tree[j]
                j -= j & -j
            rf[d] = rf.get(d, 0) + 1
            j = prev + 1
            while j <= n:
                tree[j] -= 1
                j += j & -j
        last[item] = i
        j = i + 1
        while j <= n:
            tree[j] += 1
            j += j & -j
    if cold:
        rf[-1] = cold
    return ReuseHistogram(rf)


@dataclass
class ComparisonReport:
    """Per-bin differences between two histograms.

    ``accuracy`` is the symmetric overlap fraction
    1 - sum(|a_d - b_d|) / (2 * max(total_a, total_b)), which is 1.0 on
    exact match and 0.0 for disjoint histograms.
    """

    diffs: dict[int, tuple[int, int]]
    only_in_a: frozenset[int]
    only_in_b: frozenset[int]
    accuracy: float
    equal: bool

    def to_csv(self) -> str:
        lines = ["distance,freq_a,freq_b,abs_diff"]
        for d in sorted(self.diffs):
            fa, fb = self.diffs[d]
            lines.append(f"{d},{fa},{fb},{abs(fa - fb)}")
        lines.append(f"accuracy,,,{self.accuracy!r}")
        return "\n".join(lines) + "\n"


def compare_profiles(a: ReuseHistogram, b: ReuseHistogram) -> ComparisonReport:
    diffs = {
        d: (a.bins.get(d, 0), b.bins.get(d, 0)) for d in set(a.bins) | set(b.bins)
    }
    mismatch = sum(abs(fa - fb) for fa, fb in diffs.values())
    denom = 2 * max(a.total, b.total)
    accuracy = 1.0 - mismatch / denom if denom else 1.0
    return ComparisonReport(
        diffs=diffs,
        only_in_a=frozenset(set(a.bins) - set(b.bins)),
        only_in_b=frozenset(set(b.bins) - set(a.bins)),
        accuracy=accuracy,
        equal=a.bins == b.bins,
    )
