"""Command-line interface.

Subcommands cover the whole pipeline: ``lower`` a kernel to a trace,
``profile``/``oracle`` a trace at concrete bounds, ``predict`` the
histogram at large bounds, ``hitrate`` a histogram against a cache,
``compare`` two histograms, and ``gen`` random kernels. Output files
are byte-deterministic for identical inputs and flags; wall-clock
timings appear only in the report printed to stdout.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import gen
from .cache import CacheConfig, hit_rate
from .errors import (
    EmptyHistogram,
    EmptyList,
    InconsistentSamples,
    InvalidConfig,
    KernelSyntaxError,
    MissingBound,
    NegativeFrequency,
    NonAffineDilation,
    NonlinearResidual,
    ReuseProfError,
    SizeLimitExceeded,
    TraceFormatError,
    UnsupportedLoopDepth,
)
from .extrapolate import collect_samples, predict_profile
from .flatten import DEFAULT_SIZE_LIMIT, flatten
from .kernel import lower_kernel, parse_kernel
from .oracle import compare_profiles, exact_profile
from .profile import ReuseHistogram, compute_profile
from .trace import parse_trace, render_trace, trace_length

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INPUT = 2
EXIT_SIZE = 3
EXIT_MODEL = 4
EXIT_RESIDUAL = 5

_INPUT_ERRORS = (TraceFormatError, KernelSyntaxError, MissingBound, InvalidConfig)
_MODEL_ERRORS = (
    UnsupportedLoopDepth,
    InconsistentSamples,
    NonlinearResidual,
    NonAffineDilation,
    EmptyList,
    NegativeFrequency,
    EmptyHistogram,
)


def _size_limit() -> int:
    raw = os.environ.get("REUSEPROF_SIZE_LIMIT")
    return int(raw) if raw else DEFAULT_SIZE_LIMIT


def _read(path: str) -> str:
    with open(path, encoding="ascii") as fh:
        return fh.read()


def _write_out(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_bounds(raw: str) -> list[int]:
    try:
        return [int(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError:
        raise MissingBound(f"bounds must be comma-separated integers, got {raw!r}")


def _cache_from_args(args) -> CacheConfig | None:
    if args.cache:
        values = {}
        for line in _read(args.cache).splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            values[key.strip()] = int(val.strip())
        try:
            return CacheConfig(
                values["capacity_bytes"], values["associativity"], values["line_bytes"]
            )
        except KeyError as exc:
            raise InvalidConfig(f"cache file is missing {exc}")
    if args.cache_size or args.assoc or args.line_size:
        if not (args.cache_size and args.assoc and args.line_size):
            raise InvalidConfig(
                "--cache-size, --assoc and --line-size must be given together"
            )
        return CacheConfig(args.cache_size, args.assoc, args.line_size)
    return None


def _hist_csv(hist: ReuseHistogram) -> str:
    lines = ["distance,frequency"]
    lines += [f"{d},{f}" for d, f in hist.sorted_items()]
    return "\n".join(lines) + "\n"


def _hist_text(hist: ReuseHistogram, fmt: str) -> str:
    return _hist_csv(hist) if fmt == "csv" else hist.to_text() + "\n"


def cmd_lower(args) -> int:
    kernel = parse_kernel(_read(args.kernel))
    text = render_trace(lower_kernel(kernel)) + "\n"
    _write_out(text, args.output)
    return EXIT_OK


def _profile_common(args, profiler) -> int:
    trace = parse_trace(_read(args.trace))
    bounds = _parse_bounds(args.bounds)
    t0 = time.perf_counter()
    flat = flatten(trace, bounds, max_symbols=_size_limit())
    t1 = time.perf_counter()
    hist = profiler(flat)
    t2 = time.perf_counter()
    _write_out(_hist_text(hist, args.format), args.output)
    print(
        f"# symbols {len(flat)} flatten_s {t1 - t0:.6f} profile_s {t2 - t1:.6f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_profile(args) -> int:
    return _profile_common(args, compute_profile)


def cmd_oracle(args) -> int:
    return _profile_common(args, exact_profile)


def cmd_predict(args) -> int:
    trace = parse_trace(_read(args.trace))
    target = _parse_bounds(args.target)
    cache = _cache_from_args(args)

    timings: list[tuple[str, float]] = []
    t0 = time.perf_counter()
    samples = collect_samples(trace)
    timings.append(("collect_samples", time.perf_counter() - t0))
    t0 = time.perf_counter()
    predicted = predict_profile(trace, target, samples)
    timings.append(("fit_and_predict", time.perf_counter() - t0))

    report = [f"input {args.trace}", f"target {','.join(map(str, target))}"]
    hist = predicted.histogram
    report.append(f"predicted_bins {len(hist.bins)}")
    report.append(f"predicted_total {hist.total}")
    report.append(f"expected_total {predicted.expected_total}")
    report.append(f"residual {predicted.residual}")
    stable_bins = sum(1 for v in predicted.provenance.values() if v == "stable")
    report.append(f"stable_bins {stable_bins}")
    report.append(f"volatile_bins {len(predicted.provenance) - stable_bins}")
    for w in predicted.warnings:
        report.append(f"warning {w}")
    if cache:
        report.append(f"static_hit_rate {hit_rate(hist, cache)!r}")

    oracle_hist = None
    if args.oracle:
        t0 = time.perf_counter()
        flat = flatten(trace, target, max_symbols=_size_limit())
        oracle_hist = exact_profile(flat)
        timings.append(("oracle", time.perf_counter() - t0))
        comparison = compare_profiles(hist, oracle_hist)
        report.append(f"oracle_total {oracle_hist.total}")
        report.append(f"comparison_accuracy {comparison.accuracy!r}")
        report.append(f"comparison_equal {comparison.equal}")
        if cache:
            report.append(f"oracle_hit_rate {hit_rate(oracle_hist, cache)!r}")

    if args.output:
        _write_out(_hist_text(hist, args.format), args.output)
    if args.provenance_out:
        _write_out(predicted.provenance_text(), args.provenance_out)
    for line in report:
        print(line)
    for stage, dt in timings:
        print(f"timing {stage}_s {dt:.6f}")
    return EXIT_OK if predicted.residual == 0 else EXIT_RESIDUAL


def cmd_hitrate(args) -> int:
    hist = ReuseHistogram.from_text(_read(args.histogram))
    cache = _cache_from_args(args)
    if cache is None:
        raise InvalidConfig("a cache geometry is required")
    print(repr(hit_rate(hist, cache)))
    return EXIT_OK


def cmd_compare(args) -> int:
    a = ReuseHistogram.from_text(_read(args.hist_a))
    b = ReuseHistogram.from_text(_read(args.hist_b))
    report = compare_profiles(a, b)
    if args.format == "csv":
        _write_out(report.to_csv(), args.output)
    else:
        lines = [
            f"accuracy {report.accuracy!r}",
            f"equal {report.equal}",
            f"only_in_a {sorted(report.only_in_a)}",
            f"only_in_b {sorted(report.only_in_b)}",
        ]
        _write_out("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    text = gen.generate_kernel(
        args.seed,
        args.levels,
        max_arrays=args.arrays,
        max_statements=args.statements,
        allow_constant_index=args.constants,
    )
    _write_out(text, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reuseprof",
        description="static reuse-distance profiles and cache hit rates "
        "for loop-nest kernels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lower", help="lower a kernel to a loop-annotated trace")
    p.add_argument("kernel")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_lower)

    for name, help_text in (
        ("profile", "flatten at bounds and profile by direct window scan"),
        ("oracle", "flatten at bounds and profile with the tree method"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("trace")
        p.add_argument("--bounds", required=True, help="comma-separated, outermost first")
        p.add_argument("--format", choices=("text", "csv"), default="text")
        p.add_argument("-o", "--output")
        p.set_defaults(func=cmd_profile if name == "profile" else cmd_oracle)

    p = sub.add_parser("predict", help="extrapolate the histogram to target bounds")
    p.add_argument("trace")
    p.add_argument("--target", required=True, help="comma-separated, outermost first")
    p.add_argument("--oracle", action="store_true", help="also run the exact oracle")
    p.add_argument("--cache", help="cache config file (capacity_bytes/associativity/line_bytes)")
    p.add_argument("--cache-size", type=int)
    p.add_argument("--assoc", type=int)
    p.add_argument("--line-size", type=int)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("-o", "--output", help="write the predicted histogram here")
    p.add_argument("--provenance-out", help="write the per-bin provenance here")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("hitrate", help="hit rate of a histogram file")
    p.add_argument("histogram")
    p.add_argument("--cache")
    p.add_argument("--cache-size", type=int)
    p.add_argument("--assoc", type=int)
    p.add_argument("--line-size", type=int)
    p.set_defaults(func=cmd_hitrate)

    p = sub.add_parser("compare", help="compare two histogram files")
    p.add_argument("hist_a")
    p.add_argument("hist_b")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", help="emit a random valid kernel")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--arrays", type=int, default=3)
    p.add_argument("--statements", type=int, default=3)
    p.add_argument("--constants", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except _MODEL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (OSError, ReuseProfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
