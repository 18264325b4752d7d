"""Loop-annotated static traces and their bracketed text format.

A trace is a linear token stream in which loop bodies are delimited by
bracket markers carrying the iteration count and the control variable,
e.g. ``x, i, [4~i, i, A~i, i, i, ], i``. Array references are annotated
with the variables (or integer constants) that index them, so the
stream stays finite no matter how large the bounds are. Flattened
traces additionally carry concrete index values, e.g. ``A~i~k-0-1``.

All types here are immutable; the operations are pure functions.
"""

from __future__ import annotations

import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .errors import (
    MalformedToken,
    MissingBound,
    UnbalancedBrackets,
    UnknownIndexVariable,
)

_REF_RE = re.compile(r"([A-Za-z_]\w*)((?:~\w+)*)((?:-\d+)*)\Z")
_OPEN_RE = re.compile(r"\[\s*(\d+)(?:~([A-Za-z_]\w*))?\Z")
_LEX_RE = re.compile(r"\[\s*\d+(?:~\w+)?|\]|[A-Za-z_]\w*(?:~\w+)*(?:-\d+)*")
_SEP_RE = re.compile(r"[\s,]*\Z")


@dataclass(frozen=True)
class Symbol:
    """One memory reference. Arrays carry index annotations in order.

    ``index_vars`` entries are loop-variable names or decimal constants
    (a constant index occupies a slot exactly like a variable).
    """

    name: str
    index_vars: tuple[str, ...] = ()
    concrete_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.concrete_indices is not None and len(self.concrete_indices) != len(
            self.index_vars
        ):
            raise MalformedToken(
                f"{self.name}: {len(self.concrete_indices)} concrete indices "
                f"for {len(self.index_vars)} index slots"
            )

    @property
    def is_array(self) -> bool:
        return bool(self.index_vars)

    def render(self) -> str:
        text = self.name + "".join(f"~{v}" for v in self.index_vars)
        if self.concrete_indices is not None:
            text += "".join(f"-{c}" for c in self.concrete_indices)
        return text


@dataclass(frozen=True)
class Ref:
    symbol: Symbol


@dataclass(frozen=True)
class LoopOpen:
    bound: int
    control_var: str


@dataclass(frozen=True)
class LoopClose:
    pass


Token = Ref | LoopOpen | LoopClose


@dataclass(frozen=True)
class AnnotatedTrace:
    """Token stream plus its loop nest, outermost first."""

    tokens: tuple[Token, ...]
    loop_vars: tuple[tuple[str, int], ...]

    @classmethod
    def from_tokens(cls, tokens: Sequence[Token]) -> "AnnotatedTrace":
        """Validate nesting and index annotations, derive the loop list.

        Loops must form a single nesting path: at most one loop per
        nesting level, brackets balanced, and every variable index of an
        array must be the control variable of an enclosing loop.
        """
        tokens = tuple(tokens)
        loop_vars: list[tuple[str, int]] = []
        enclosing: list[str] = []
        saw_loop = [False]  # one flag per open nesting level
        for tok in tokens:
            if isinstance(tok, LoopOpen):
                if tok.bound < 0:
                    raise MalformedToken(f"negative loop bound {tok.bound}")
                if saw_loop[-1]:
                    raise MalformedToken(
                        f"sibling loop [{tok.bound}~{tok.control_var}: only a "
                        "single nesting path is representable"
                    )
                if tok.control_var in enclosing:
                    raise MalformedToken(
                        f"duplicate control variable {tok.control_var!r}"
                    )
                saw_loop[-1] = True
                enclosing.append(tok.control_var)
                loop_vars.append((tok.control_var, tok.bound))
                saw_loop.append(False)
            elif isinstance(tok, LoopClose):
                if not enclosing:
                    raise UnbalancedBrackets("unmatched ]")
                enclosing.pop()
                saw_loop.pop()
            else:
                sym = tok.symbol
                for part in sym.index_vars:
                    if not part.isdigit() and part not in enclosing:
                        raise UnknownIndexVariable(
                            f"{sym.render()}: index variable {part!r} has no "
                            "enclosing loop"
                        )
        if enclosing:
            raise UnbalancedBrackets(f"{len(enclosing)} unclosed loop(s)")
        return cls(tokens, tuple(loop_vars))

    @property
    def loop_names(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.loop_vars)

    @property
    def default_bounds(self) -> dict[str, int]:
        return dict(self.loop_vars)


def _parse_ref(text: str) -> Symbol:
    m = _REF_RE.match(text)
    if not m:
        raise MalformedToken(f"unrecognized token {text!r}")
    name, vars_part, conc_part = m.groups()
    index_vars = tuple(vars_part.split("~")[1:]) if vars_part else ()
    concrete = tuple(int(c) for c in conc_part.split("-")[1:]) if conc_part else None
    return Symbol(name, index_vars, concrete)


def parse_trace(text: str) -> AnnotatedTrace:
    """Parse bracketed trace text.

    Commas and whitespace both separate tokens. A loop opener may omit
    its control variable (``[4`` instead of ``[4~i``), in which case the
    variable is taken from the scalar reference immediately before it.
    """
    tokens: list[Token] = []
    pos = 0
    for m in _LEX_RE.finditer(text):
        if not _SEP_RE.match(text, pos, m.start()):
            raise MalformedToken(
                f"unexpected text {text[pos:m.start()]!r} at offset {pos}"
            )
        pos = m.end()
        piece = m.group()
        if piece == "]":
            tokens.append(LoopClose())
        elif piece.startswith("["):
            om = _OPEN_RE.match(piece)
            bound, var = int(om.group(1)), om.group(2)
            if var is None:
                prev = tokens[-1] if tokens else None
                if not isinstance(prev, Ref) or prev.symbol.is_array:
                    raise MalformedToken(
                        f"[{bound} has no control variable and no preceding "
                        "scalar reference to infer one from"
                    )
                var = prev.symbol.name
            tokens.append(LoopOpen(bound, var))
        else:
            tokens.append(Ref(_parse_ref(piece)))
    if not _SEP_RE.match(text, pos):
        raise MalformedToken(f"unexpected text {text[pos:]!r} at offset {pos}")
    return AnnotatedTrace.from_tokens(tokens)


def render_trace(trace: AnnotatedTrace) -> str:
    """Canonical text form; ``parse_trace`` round-trips it exactly."""
    parts = []
    for tok in trace.tokens:
        if isinstance(tok, LoopOpen):
            parts.append(f"[{tok.bound}~{tok.control_var}")
        elif isinstance(tok, LoopClose):
            parts.append("]")
        else:
            parts.append(tok.symbol.render())
    return ", ".join(parts)


def normalize_bounds(
    trace: AnnotatedTrace, bounds: Mapping[str, int] | Sequence[int]
) -> dict[str, int]:
    """Resolve a bound vector against the trace's loops, outermost first."""
    names = trace.loop_names
    if isinstance(bounds, Mapping):
        extra = set(bounds) - set(names)
        if extra:
            raise MissingBound(f"bounds name unknown loop variable(s) {sorted(extra)}")
        missing = [v for v in names if v not in bounds]
        if missing:
            raise MissingBound(f"no bound for loop variable(s) {missing}")
        resolved = {v: int(bounds[v]) for v in names}
    else:
        values = list(bounds)
        if len(values) != len(names):
            raise MissingBound(
                f"{len(values)} bounds for {len(names)} loops {list(names)}"
            )
        resolved = {v: int(b) for v, b in zip(names, values)}
    for v, b in resolved.items():
        if b < 0:
            raise MissingBound(f"negative bound {b} for {v}")
    return resolved


def trace_length(
    trace: AnnotatedTrace, bounds: Mapping[str, int] | Sequence[int]
) -> int:
    """Exact symbol count of the flattened trace, in closed form.

    Each loop contributes bound times its body count; nothing is
    materialized, so this is O(tokens) regardless of the bounds.
    """
    bmap = normalize_bounds(trace, bounds)
    totals = [0]
    mults: list[int] = []
    for tok in trace.tokens:
        if isinstance(tok, Ref):
            totals[-1] += 1
        elif isinstance(tok, LoopOpen):
            totals.append(0)
            mults.append(bmap[tok.control_var])
        else:
            body = totals.pop()
            totals[-1] += mults.pop() * body
    return totals[0]
