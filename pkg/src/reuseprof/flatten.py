"""Unrolling annotated traces at concrete bounds."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .errors import SizeLimitExceeded
from .trace import AnnotatedTrace, LoopOpen, Ref, normalize_bounds, trace_length

DEFAULT_SIZE_LIMIT = 10**8


@dataclass
class FlatTrace:
    """Fully concretized symbol sequence.

    Every entry is a rendered symbol string; array references carry
    their concrete indices (``A~i~k-0-1``), scalar references repeat
    unchanged across iterations.
    """

    symbols: list[str]
    origin_bounds: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.symbols)

    def to_text(self) -> str:
        return "".join(s + "\n" for s in self.symbols)

    @classmethod
    def from_text(cls, text: str) -> "FlatTrace":
        return cls([line for line in text.splitlines() if line.strip()])


# Compiled body items: ("ref", rendered) for scalars, ("array", name,
# slots) for arrays where each slot is a constant string or a variable
# marker, ("loop", var, body) for nests.
def _compile(trace: AnnotatedTrace):
    stack: list[list] = [[]]
    for tok in trace.tokens:
        if isinstance(tok, Ref):
            sym = tok.symbol
            if sym.is_array:
                slots = tuple(
                    (p, p.isdigit()) for p in sym.index_vars
                )
                prefix = sym.name + "".join(f"~{p}" for p in sym.index_vars)
                stack[-1].append(("array", prefix, slots))
            else:
                stack[-1].append(("ref", sym.render()))
        elif isinstance(tok, LoopOpen):
            stack.append([])
            stack[-2].append(("loop", tok.control_var, stack[-1]))
        else:
            stack.pop()
    return stack[0]


def flatten(
    trace: AnnotatedTrace,
    bounds: Mapping[str, int] | Sequence[int],
    max_symbols: int = DEFAULT_SIZE_LIMIT,
) -> FlatTrace:
    """Replicate every loop body bound-many times and concretize arrays.

    The control variable takes the values 0..bound-1 in order; each
    array reference is renamed per iteration tuple, so distinct
    elements become distinct symbols. Raises SizeLimitExceeded before
    materializing anything too large.
    """
    bmap = normalize_bounds(trace, bounds)
    total = trace_length(trace, bmap)
    if total > max_symbols:
        raise SizeLimitExceeded(
            f"flattened trace would hold {total} symbols "
            f"(cap {max_symbols}); use prediction instead"
        )

    program = _compile(trace)
    env: dict[str, int] = {}
    out: list[str] = []
    append = out.append
    # Frames: [items, index, control_var or None, remaining iterations].
    stack: list[list] = [[program, 0, None, 1]]
    while stack:
        frame = stack[-1]
        items, idx = frame[0], frame[1]
        if idx >= len(items):
            var, remaining = frame[2], frame[3] - 1
            if var is not None and remaining > 0:
                frame[1] = 0
                frame[3] = remaining
                env[var] += 1
            else:
                stack.pop()
            continue
        frame[1] = idx + 1
        item = items[idx]
        kind = item[0]
        if kind == "ref":
            append(item[1])
        elif kind == "array":
            _, prefix, slots = item
            append(
                prefix
                + "".join(
                    f"-{part}" if is_const else f"-{env[part]}"
                    for part, is_const in slots
                )
            )
        else:
            _, var, inner = item
            count = bmap[var]
            if count > 0:
                env[var] = 0
                stack.append([inner, 0, var, count])
    return FlatTrace(out, bmap)
