"""Reference kernels, traces and histograms shared across the tests.

The two kernels below are the worked examples the fitting rules were
calibrated against: a three-level nest with a dilating volatile block
and a single loop whose histogram scales affinely. The histograms were
produced by the direct window-scan profiler and cross-checked by hand.
"""

NEST3_KERNEL = """\
scalar retval;
scalar alpha;
for i < 300 {
  for j < 200 {
    for k < 102 {
      A[i][k] = alpha * A[i][k];
      B[j][k] = alpha;
    }
  }
}
"""

# canonical text of the trace NEST3_KERNEL lowers to
NEST3_TRACE_TEXT = (
    "retval, alpha, i, [300~i, i, j, [200~j, j, k, [102~k, k, alpha, i, k, "
    "A~i~k, i, k, A~i~k, alpha, j, k, B~j~k, k, k, ], k, j, j, ], j, i, i, ], i"
)

# same trace as commonly written by hand: whitespace before brackets,
# no trailing commas inside loops
NEST3_TRACE_LOOSE = (
    "retval, alpha, i, [300~i, i, j, [200~j, j, k, [102~k, k, alpha, i, k, "
    "A~i~k, i, k, A~i~k, alpha, j, k, B~j~k, k, k ], k, j, j ], j, i, i], i"
)

# single loop over k with a constant leading index; no store to alpha
# before the loop, so the trace starts "retval, k"
SINGLE_KERNEL_PLAIN = """\
scalar retval;
for k < 2 {
  A[0][k] = alpha * A[0][k];
  B[0][k] = alpha;
}
"""

SINGLE_TRACE_PLAIN = (
    "retval, k, [2, k, alpha, k, A~0~k, k, A~0~k, alpha, k, B~0~k, k, k, ], k"
)

# same loop with alpha initialized before the nest; this variant is the
# one the reference sweep histograms below were measured from
SINGLE_KERNEL = """\
scalar retval;
scalar alpha;
for k < 102 {
  A[0][k] = alpha * A[0][k];
  B[0][k] = alpha;
}
"""

# exact profiles of SINGLE_KERNEL flattened at k = 2, 3, 4
SWEEP1_HISTS = {
    2: {0: 5, 1: 9, 2: 5, -1: 7},
    3: {0: 7, 1: 13, 2: 8, -1: 9},
    4: {0: 9, 1: 17, 2: 11, -1: 11},
}

# frequency prediction of SINGLE_KERNEL at k = 102
PREDICT1_102 = {0: 205, 1: 409, 2: 305, -1: 207}

# exact profiles of NEST3_KERNEL flattened at (2, 2, k) for k = 2, 3, 4
NEST3_SWEEP_HISTS = {
    2: {0: 35, 1: 11, 2: 37, 3: 25, 4: 5, 5: 12, 7: 4, 9: 1, 10: 2, 11: 1, -1: 13},
    3: {0: 43, 1: 15, 2: 53, 3: 37, 4: 5, 5: 20, 9: 6, 12: 1, 13: 2, 14: 2, 15: 1, -1: 17},
    4: {0: 51, 1: 19, 2: 69, 3: 49, 4: 5, 5: 28, 11: 8, 15: 1, 16: 2, 17: 2, 18: 2, 19: 1, -1: 21},
}

NEST3_STABLE = frozenset({0, 1, 2, 3, 4, 5, -1})

NEST3_VOLATILE_LISTS = [
    [(7, 4), (9, 1), (10, 2), (11, 1)],
    [(9, 6), (12, 1), (13, 2), (14, 2), (15, 1)],
    [(11, 8), (15, 1), (16, 2), (17, 2), (18, 2), (19, 1)],
]

# two-level kernel with a transposed second matrix
MVT_LIKE_KERNEL = """\
scalar retval;
scalar alpha;
for i < 100 {
  for j < 200 {
    x1[i] = x1[i] * A[i][j];
    x2[i] = x2[i] * B[j][i];
  }
}
"""

# 64KB, 32-way, 32B lines: the fixed geometry used throughout
CACHE_GEOMETRY = (64 * 1024, 32, 32)
