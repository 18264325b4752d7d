"""Histogram extrapolation from small-bound samples.

The predictor splits a reuse histogram into two parts. Stable bins keep
their distance at every sampled bound and their frequencies follow a
multilinear model in the bounds: a base frequency at the anchor corner
(all bounds 2), one increment per loop, and interaction coefficients
extracted by finite differences over the {2,3}^n corner cube, validated
against the {4} probe of each loop. Volatile bins shift their distances
as the bounds grow; they form a block with a start distance, a size,
front-aligned gap functions (tail positions inherit the last fitted
gap), and frequencies fitted from both ends of the block with the
middle replicating the innermost suffix value. Every block parameter is
itself multilinear in the bounds, so one mechanism covers single loops
and nests alike.

When the block overlaps fixed-distance bins at the smallest bounds the
two parts cannot be told apart there and the fit does not validate. In
that case the whole procedure is retried with the sample cube anchored
at 3 and then 4, where the block has moved clear; the fitted
polynomials extrapolate to any target bounds regardless of the anchor.
Prediction cost depends only on the bin count, never on the target.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations, product

from .errors import (
    EmptyList,
    InconsistentSamples,
    NegativeFrequency,
    NonAffineDilation,
    NonlinearResidual,
    ReuseProfError,
    UnsupportedLoopDepth,
)
from .flatten import flatten
from .profile import ReuseHistogram, compute_profile
from .trace import AnnotatedTrace, normalize_bounds, trace_length

BASE = 2
ANCHORS = (2, 3, 4)

Coeffs = dict[frozenset[int], int]


def _subsets(dims: Sequence[int]):
    for r in range(len(dims) + 1):
        yield from (frozenset(c) for c in combinations(dims, r))


def _multilinear_fit(
    values: Mapping[tuple[int, ...], int], n: int, anchor: int = BASE
) -> Coeffs:
    """Finite differences over the {anchor, anchor+1}^n corners."""
    coeffs: Coeffs = {}
    for s in _subsets(range(n)):
        acc = 0
        for t in _subsets(sorted(s)):
            corner = tuple(anchor + 1 if d in t else anchor for d in range(n))
            sign = -1 if (len(s) - len(t)) % 2 else 1
            acc += sign * values[corner]
        coeffs[s] = acc
    return coeffs


def _multilinear_eval(coeffs: Coeffs, target: tuple[int, ...], anchor: int = BASE) -> int:
    total = 0
    for s, c in coeffs.items():
        if c:
            for d in s:
                c *= target[d] - anchor
            total += c
    return total


@dataclass
class SampleSet:
    """Exact histograms at the corner and probe bounds of a trace."""

    loop_vars: tuple[str, ...]
    samples: dict[tuple[int, ...], ReuseHistogram]
    anchor: int = BASE

    @property
    def n(self) -> int:
        return len(self.loop_vars)

    @property
    def probe_values(self) -> tuple[int, int, int]:
        return (self.anchor, self.anchor + 1, self.anchor + 2)

    def corners(self) -> list[tuple[int, ...]]:
        return [tuple(c) for c in product((self.anchor, self.anchor + 1), repeat=self.n)]

    def sweep_points(self, dim: int) -> list[tuple[int, ...]]:
        return [
            tuple(v if d == dim else self.anchor for d in range(self.n))
            for v in self.probe_values
        ]

    def probe_points(self) -> list[tuple[int, ...]]:
        return [self.sweep_points(d)[-1] for d in range(self.n)]

    def required_points(self) -> list[tuple[int, ...]]:
        seen: dict[tuple[int, ...], None] = {}
        for c in self.corners():
            seen[c] = None
        for d in range(self.n):
            for p in self.sweep_points(d):
                seen[p] = None
        return list(seen)

    def histogram(self, point: tuple[int, ...]) -> ReuseHistogram:
        try:
            return self.samples[tuple(point)]
        except KeyError:
            raise InconsistentSamples(f"no sample at bounds {point}") from None


def collect_samples(
    trace: AnnotatedTrace, max_symbols: int = 10**7, anchor: int = BASE
) -> SampleSet:
    """Flatten and profile the trace at every corner and probe point."""
    names = trace.loop_names
    if not 1 <= len(names) <= 3:
        raise UnsupportedLoopDepth(
            f"extrapolation supports 1 to 3 loops, trace has {len(names)}"
        )
    sset = SampleSet(names, {}, anchor)
    for point in sset.required_points():
        flat = flatten(trace, point, max_symbols=max_symbols)
        sset.samples[point] = compute_profile(flat)
    return sset


def classify_distances(
    samples: SampleSet,
) -> tuple[frozenset[int], dict[str, list[list[tuple[int, int]]]]]:
    """Split bins into stable distances and per-sweep volatile lists.

    A distance is stable when it occurs in every sample and its
    frequencies match the multilinear corner fit exactly at every probe
    point. The cold-miss bin (-1) is always stable. Everything else
    forms, per sweep, an ordered (distance, frequency) list.
    """
    points = samples.required_points()
    hists = {p: samples.histogram(p) for p in points}
    universal = set.intersection(*(set(h.bins) for h in hists.values()))
    present = set.union(*(set(h.bins) for h in hists.values()))
    stable = {-1} if -1 in present else set()
    corners = samples.corners()
    probes = samples.probe_points()
    for d in universal:
        if d == -1:
            continue
        coeffs = _multilinear_fit(
            {c: hists[c].bins.get(d, 0) for c in corners}, samples.n, samples.anchor
        )
        if all(
            _multilinear_eval(coeffs, p, samples.anchor) == hists[p].bins.get(d, 0)
            for p in probes
        ):
            stable.add(d)
    volatile: dict[str, list[list[tuple[int, int]]]] = {}
    for dim, var in enumerate(samples.loop_vars):
        volatile[var] = [
            sorted((d, f) for d, f in hists[p].bins.items() if d not in stable)
            for p in samples.sweep_points(dim)
        ]
    return frozenset(stable), volatile


@dataclass
class StableModel:
    """Multilinear frequency model for the fixed-distance bins."""

    loop_vars: tuple[str, ...]
    coefficients: dict[int, Coeffs]
    anchor: int = BASE

    def base(self, distance: int) -> int:
        return self.coefficients[distance][frozenset()]

    def increment(self, distance: int, var: str) -> int:
        return self.coefficients[distance][frozenset({self.loop_vars.index(var)})]

    def interaction(self, distance: int, *vars_: str) -> int:
        dims = frozenset(self.loop_vars.index(v) for v in vars_)
        return self.coefficients[distance][dims]

    def predict_frequency(self, distance: int, target: tuple[int, ...]) -> int:
        return _multilinear_eval(self.coefficients[distance], target, self.anchor)

    def predict(self, target: tuple[int, ...]) -> dict[int, int]:
        return {
            d: _multilinear_eval(c, target, self.anchor)
            for d, c in self.coefficients.items()
        }


def fit_stable(
    samples: SampleSet, stable: frozenset[int] | None = None
) -> StableModel:
    """Fit the multilinear model for every stable distance."""
    if stable is None:
        stable, _ = classify_distances(samples)
    corners = samples.corners()
    hists = {p: samples.histogram(p) for p in samples.required_points()}
    coefficients: dict[int, Coeffs] = {}
    for d in sorted(stable):
        coeffs = _multilinear_fit(
            {c: hists[c].bins.get(d, 0) for c in corners}, samples.n, samples.anchor
        )
        for p in samples.probe_points():
            if _multilinear_eval(coeffs, p, samples.anchor) != hists[p].bins.get(d, 0):
                raise NonlinearResidual(
                    f"distance {d} fails validation at bounds {p}"
                )
        coefficients[d] = coeffs
    return StableModel(samples.loop_vars, coefficients, samples.anchor)


# --- volatile block machinery ---------------------------------------------


def _front_len(freq_lists: list[list[int]]) -> int:
    limit = min(len(f) for f in freq_lists)
    p = 0
    while p < limit:
        v = [f[p] for f in freq_lists]
        if v[2] - v[1] != v[1] - v[0]:
            break
        p += 1
    return p


def _back_len(freq_lists: list[list[int]]) -> int:
    limit = min(len(f) for f in freq_lists)
    q = 0
    while q < limit:
        v = [f[len(f) - 1 - q] for f in freq_lists]
        if v[2] - v[1] != v[1] - v[0]:
            break
        q += 1
    return q


def _affine3(values: Sequence[int], what: str) -> tuple[int, int]:
    """(value at the first probe, slope) of an exactly affine sequence."""
    v0, v1, v2 = values
    if v2 - v1 != v1 - v0:
        raise NonAffineDilation(f"{what} sequence {tuple(values)} is not affine")
    return v0, v1 - v0


def _gap_observations(dist_lists: list[list[int]], probe_values=ANCHORS):
    """Front-aligned gap values per position across the probe lists."""
    gaps = [[d[p + 1] - d[p] for p in range(len(d) - 1)] for d in dist_lists]
    maxlen = max((len(g) for g in gaps), default=0)
    out = []
    for p in range(maxlen):
        out.append([(x, g[p]) for x, g in zip(probe_values, gaps) if p < len(g)])
    return out


def _assemble_block(size, start, gap_at, front_vals, back_vals, middle_val):
    """Build the (distance, frequency) list of a predicted volatile block."""
    if size < 0 or start < 0:
        raise InconsistentSamples(
            f"volatile block with size {size} and start {start}"
        )
    if size == 0:
        return []
    dists = [start]
    for p in range(size - 1):
        g = gap_at(p)
        if g < 1:
            raise InconsistentSamples(f"non-increasing volatile distances (gap {g})")
        dists.append(dists[-1] + g)
    freqs: list[int | None] = [None] * size
    for p, v in enumerate(front_vals[:size]):
        freqs[p] = v
    for q, v in enumerate(back_vals[:size]):
        freqs[size - 1 - q] = v
    if any(f is None for f in freqs):
        if middle_val is None:
            raise InconsistentSamples("no anchor value for middle positions")
        freqs = [middle_val if f is None else f for f in freqs]
    for f in freqs:
        if f < 0:
            raise NegativeFrequency(f"volatile frequency {f}")
    return list(zip(dists, freqs))


def fit_volatile(
    sweep_lists: Sequence[Sequence[tuple[int, int]]], target: int
) -> list[tuple[int, int]]:
    """Predict a volatile block from its three probe-bound lists.

    ``sweep_lists`` holds the ordered (distance, frequency) pairs
    observed at bounds 2, 3 and 4 of a single swept loop. The block's
    start and size must be affine in the bound; gap and frequency
    positions follow the alignment rules described in the module
    docstring.
    """
    if len(sweep_lists) != 3:
        raise InconsistentSamples("need exactly three probe lists")
    lists = [list(l) for l in sweep_lists]
    if any(not l for l in lists):
        raise EmptyList("volatile probe lists must be non-empty")
    dists = [[d for d, _ in l] for l in lists]
    freqs = [[f for _, f in l] for l in lists]
    for d in dists:
        if any(b <= a for a, b in zip(d, d[1:])):
            raise InconsistentSamples("probe list distances must increase")

    sv, ss = _affine3([len(l) for l in lists], "size")
    bv, bs = _affine3([d[0] for d in dists], "start")
    size = sv + (target - BASE) * ss
    start = bv + (target - BASE) * bs

    gap_fns: list[tuple[int, int, int]] = []  # (anchor x, value, slope)
    for obs in _gap_observations(dists, (2, 3, 4)):
        if len(obs) >= 2:
            (xa, va), (xb, vb) = obs[-2], obs[-1]
            gap_fns.append((xb, vb, (vb - va) // (xb - xa)))
        elif gap_fns:
            gap_fns.append(gap_fns[-1])
        else:
            gap_fns.append((obs[0][0], obs[0][1], 0))

    def gap_at(p: int) -> int:
        if not gap_fns:
            raise InconsistentSamples("no gap observations for a block of this size")
        x0, v0, slope = gap_fns[min(p, len(gap_fns) - 1)]
        return v0 + (target - x0) * slope

    front_n = _front_len(freqs)
    back_n = _back_len(freqs)

    def affine_at(values: Sequence[int]) -> int:
        return values[0] + (target - BASE) * (values[1] - values[0])

    front_vals = [affine_at([f[p] for f in freqs]) for p in range(front_n)]
    back_vals = [
        affine_at([f[len(f) - 1 - q] for f in freqs]) for q in range(back_n)
    ]
    if back_n:
        middle = back_vals[back_n - 1]
    elif front_n:
        middle = front_vals[front_n - 1]
    else:
        middle = None
    return _assemble_block(size, start, gap_at, front_vals, back_vals, middle)


@dataclass
class VolatileModel:
    """Volatile block with every parameter multilinear in the bounds."""

    loop_vars: tuple[str, ...]
    size: Coeffs
    start: Coeffs
    gap_slots: list[Coeffs]
    front_slots: list[Coeffs]
    back_slots: list[Coeffs]
    anchor: int = BASE
    warnings: list[str] = field(default_factory=list)

    def predict(self, target: tuple[int, ...]) -> list[tuple[int, int]]:
        size = _multilinear_eval(self.size, target, self.anchor)
        start = _multilinear_eval(self.start, target, self.anchor)

        def gap_at(p: int) -> int:
            if not self.gap_slots:
                raise InconsistentSamples(
                    "no gap observations for a block of this size"
                )
            slot = self.gap_slots[min(p, len(self.gap_slots) - 1)]
            return _multilinear_eval(slot, target, self.anchor)

        front_vals = [_multilinear_eval(c, target, self.anchor) for c in self.front_slots]
        back_vals = [_multilinear_eval(c, target, self.anchor) for c in self.back_slots]
        if back_vals:
            middle = back_vals[-1]
        elif front_vals:
            middle = front_vals[-1]
        else:
            middle = None
        return _assemble_block(size, start, gap_at, front_vals, back_vals, middle)


def _build_volatile_model(
    samples: SampleSet, stable: frozenset[int]
) -> VolatileModel | None:
    n = samples.n
    anchor = samples.anchor
    points = samples.required_points()
    vlists = {
        p: sorted(
            (d, f)
            for d, f in samples.histogram(p).bins.items()
            if d not in stable
        )
        for p in points
    }
    if all(not v for v in vlists.values()):
        return None
    inner_sweep = samples.sweep_points(n - 1)
    sweep_lists = [vlists[p] for p in inner_sweep]
    if any(not l for l in sweep_lists):
        raise InconsistentSamples(
            "volatile bins present at some bounds but absent from the "
            "innermost sweep"
        )
    dists = [[d for d, _ in l] for l in sweep_lists]
    freqs = [[f for _, f in l] for l in sweep_lists]
    front_n = _front_len(freqs)
    back_n = _back_len(freqs)
    corners = samples.corners()
    warnings: list[str] = []

    def _fallback(getter, corner):
        raised = sorted(d for d in range(n) if corner[d] != anchor)
        for r in range(len(raised) - 1, -1, -1):
            for keep in combinations(raised, r):
                cand = tuple(
                    corner[d] if d in keep else anchor for d in range(n)
                )
                v = getter(cand)
                if v is not None:
                    return v
        return None

    def corner_fit(getter, what: str) -> Coeffs:
        vals = {}
        for c in corners:
            v = getter(c)
            if v is None:
                v = _fallback(getter, c)
                if v is None:
                    raise InconsistentSamples(f"cannot observe {what} at {c}")
                warnings.append(f"{what}: fallback value used for corner {c}")
            vals[c] = v
        return _multilinear_fit(vals, n, anchor)

    size = corner_fit(lambda c: len(vlists[c]), "size")
    start = corner_fit(lambda c: vlists[c][0][0] if vlists[c] else None, "start")

    def gap_getter(p):
        def get(c):
            l = vlists[c]
            return l[p + 1][0] - l[p][0] if p + 1 < len(l) else None

        return get

    base_corner = tuple(anchor for _ in range(n))
    base_gaps = len(vlists[base_corner]) - 1
    gap_slots: list[Coeffs] = []
    for p, obs in enumerate(_gap_observations(dists, samples.probe_values)):
        if p < base_gaps:
            gap_slots.append(corner_fit(gap_getter(p), f"gap[{p}]"))
        elif len(obs) >= 2:
            # seen only in deeper innermost probes: affine along the
            # innermost loop, inherited along the others
            (xa, va), (xb, vb) = obs[-2], obs[-1]
            slope = (vb - va) // (xb - xa)
            gap_slots.append(
                {frozenset(): vb - (xb - anchor) * slope, frozenset({n - 1}): slope}
            )
        elif gap_slots:
            gap_slots.append(gap_slots[-1])
        else:
            gap_slots.append({frozenset(): obs[0][1]})

    def front_getter(p):
        def get(c):
            l = vlists[c]
            return l[p][1] if p < len(l) else None

        return get

    def back_getter(q):
        def get(c):
            l = vlists[c]
            return l[len(l) - 1 - q][1] if q < len(l) else None

        return get

    front_slots = [
        corner_fit(front_getter(p), f"front[{p}]") for p in range(front_n)
    ]
    back_slots = [corner_fit(back_getter(q), f"back[{q}]") for q in range(back_n)]

    model = VolatileModel(
        samples.loop_vars,
        size,
        start,
        gap_slots,
        front_slots,
        back_slots,
        anchor,
        warnings,
    )
    for p in points:
        try:
            predicted = model.predict(p)
        except ReuseProfError as exc:
            warnings.append(f"bounds {p}: {exc}")
            continue
        if predicted != vlists[p]:
            warnings.append(f"bounds {p}: volatile block does not validate")
    return model


@dataclass
class PredictedProfile:
    """Predicted histogram plus per-bin provenance and a conservation check.

    ``residual`` is the predicted total minus the exact flattened length
    at the target; a nonzero value is reported, never rescaled away.
    """

    histogram: ReuseHistogram
    provenance: dict[int, str]
    expected_total: int
    residual: int
    warnings: tuple[str, ...] = ()

    @property
    def conserved(self) -> bool:
        return self.residual == 0

    def provenance_text(self) -> str:
        lines = [f"{d} {self.provenance[d]}" for d in sorted(self.provenance)]
        if self.residual:
            lines.append(f"residual {self.residual}")
        return "\n".join(lines) + "\n"


def _fit_models(samples: SampleSet):
    stable, _ = classify_distances(samples)
    smodel = fit_stable(samples, stable)
    vmodel = _build_volatile_model(samples, stable)
    return smodel, vmodel


def predict_profile(
    trace: AnnotatedTrace,
    target: Mapping[str, int] | Sequence[int],
    samples: SampleSet | None = None,
) -> PredictedProfile:
    """Predict the reuse histogram of a trace at arbitrary target bounds.

    Fits at the default anchor; if the volatile block does not validate
    there the sampling cube is re-anchored (3, then 4) and refitted.
    Targets below 2 are rejected; extrapolating backwards from the
    smallest corner is not meaningful.
    """
    names = trace.loop_names
    if not 1 <= len(names) <= 3:
        raise UnsupportedLoopDepth(
            f"prediction supports 1 to 3 loops, trace has {len(names)}"
        )
    bmap = normalize_bounds(trace, target)
    tgt = tuple(bmap[v] for v in names)
    if any(t < BASE for t in tgt):
        raise InconsistentSamples(f"target bounds {tgt} must all be at least {BASE}")

    attempts: list[tuple[StableModel, VolatileModel | None, tuple[str, ...]]] = []
    chosen = None
    for anchor in ANCHORS:
        try:
            if samples is not None and samples.anchor == anchor:
                sset = samples
            else:
                sset = collect_samples(trace, anchor=anchor)
            smodel, vmodel = _fit_models(sset)
        except ReuseProfError as exc:
            attempts.append((None, None, (f"anchor {anchor}: {exc}",)))
            continue
        warnings = tuple(vmodel.warnings) if vmodel is not None else ()
        if not warnings:
            chosen = (smodel, vmodel, ())
            break
        attempts.append((smodel, vmodel, warnings))
    if chosen is None:
        fitted = [a for a in attempts if a[0] is not None]
        if not fitted:
            raise InconsistentSamples(
                "no anchor admits a fit: " + "; ".join(attempts[-1][2])
            )
        chosen = min(fitted, key=lambda a: len(a[2]))
    smodel, vmodel, warnings = chosen

    bins: dict[int, int] = {}
    provenance: dict[int, str] = {}
    for d, f in smodel.predict(tgt).items():
        if f < 0:
            raise NegativeFrequency(f"stable bin {d} predicts {f}")
        if f:
            bins[d] = f
            provenance[d] = "stable"
    if vmodel is not None:
        for d, f in vmodel.predict(tgt):
            if f:
                bins[d] = bins.get(d, 0) + f
                provenance[d] = "volatile"

    histogram = ReuseHistogram(bins)
    expected = trace_length(trace, bmap)
    residual = histogram.total - expected
    return PredictedProfile(histogram, provenance, expected, residual, warnings)
