"""Static reuse-distance profiles and cache hit rates for loop nests.

The pipeline: parse or lower a loop-annotated trace, compute exact
reuse profiles at small bounds, fit per-bin frequency models plus a
dilation model for bins whose distances shift with the bounds, then
predict the histogram and cache hit rate at the real bounds. An exact
tree-based profiler doubles as the validation oracle.
"""

from .errors import ReuseProfError
from .trace import AnnotatedTrace, Symbol, parse_trace, render_trace, trace_length
from .kernel import KernelDef, parse_kernel, lower_kernel, DEFAULT_TEMPLATE
from .flatten import FlatTrace, flatten
from .profile import ReuseHistogram, compute_profile
from .oracle import exact_profile, compare_profiles
from .extrapolate import (
    SampleSet,
    collect_samples,
    classify_distances,
    fit_stable,
    fit_volatile,
    predict_profile,
)
from .cache import CacheConfig, hit_probability, hit_rate

__version__ = "0.1.0"

__all__ = [
    "AnnotatedTrace",
    "CacheConfig",
    "DEFAULT_TEMPLATE",
    "FlatTrace",
    "KernelDef",
    "ReuseHistogram",
    "ReuseProfError",
    "SampleSet",
    "Symbol",
    "classify_distances",
    "collect_samples",
    "compare_profiles",
    "compute_profile",
    "exact_profile",
    "fit_stable",
    "fit_volatile",
    "flatten",
    "hit_probability",
    "hit_rate",
    "lower_kernel",
    "parse_kernel",
    "parse_trace",
    "predict_profile",
    "render_trace",
    "trace_length",
]
