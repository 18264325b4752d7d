"""Minimal loop-nest kernel DSL and its lowering to annotated traces.

Grammar::

    kernel  := { "scalar" IDENT ";" } nest
    nest    := "for" IDENT "<" INT "{" ( nest | { stmt } ) "}"
    stmt    := access "=" expr ";"
    access  := IDENT { "[" (IDENT | INT) "]" }
    expr    := access { "*" access }

``scalar`` declarations emit one store each before the nest, in order.
Bare identifiers read inside statements need no declaration; an
undeclared scalar simply has no store ahead of the loop, so its first
access happens inside the body. Statements are only legal in the
innermost loop.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import KernelSyntaxError, NonNestedLoops, UndeclaredVariable
from .trace import AnnotatedTrace, LoopClose, LoopOpen, Ref, Symbol, Token

_KEYWORDS = {"scalar", "for"}
_TOKEN_RE = re.compile(r"[A-Za-z_]\w*|\d+|[;{}\[\]=*<]|\S")


@dataclass(frozen=True)
class Access:
    """A scalar or array reference as written in a statement."""

    name: str
    indices: tuple[str, ...] = ()

    @property
    def is_array(self) -> bool:
        return bool(self.indices)


@dataclass(frozen=True)
class StatementDef:
    write: Access
    reads: tuple[Access, ...]


@dataclass(frozen=True)
class LoopDef:
    control_var: str
    bound: int


@dataclass(frozen=True)
class KernelDef:
    preamble_symbols: tuple[str, ...]
    loops: tuple[LoopDef, ...]
    statements: tuple[StatementDef, ...]


@dataclass(frozen=True)
class EmissionTemplate:
    """Rules for the tokens a kernel element turns into.

    Per loop: a control-variable store before the opener, a condition
    load at the top of the body, ``loop_increment_loads`` trailing
    control-variable tokens, and one exit-check load after the close.
    Per statement: reads in source order, each array access preceded by
    loads of its variable indices, then the write re-emitting its index
    loads. Lowering is deterministic for a fixed template.
    """

    loop_init_store: bool = True
    loop_condition_load: bool = True
    loop_increment_loads: int = 2
    loop_exit_load: bool = True
    index_loads: bool = True
    write_after_reads: bool = True


DEFAULT_TEMPLATE = EmissionTemplate()


class _Lexer:
    def __init__(self, text: str):
        self.tokens: list[tuple[str, int, int]] = []
        for ln, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0]
            for m in _TOKEN_RE.finditer(body):
                self.tokens.append((m.group(), ln, m.start() + 1))
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def where(self) -> tuple[int, int]:
        if self.pos < len(self.tokens):
            _, ln, col = self.tokens[self.pos]
            return ln, col
        if self.tokens:
            _, ln, col = self.tokens[-1]
            return ln, col
        return 1, 1

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise KernelSyntaxError("unexpected end of input", *self.where())
        self.pos += 1
        return tok

    def expect(self, want: str) -> str:
        ln, col = self.where()
        tok = self.next()
        if tok != want:
            raise KernelSyntaxError(f"expected {want!r}, found {tok!r}", ln, col)
        return tok

    def ident(self) -> str:
        ln, col = self.where()
        tok = self.next()
        if not re.fullmatch(r"[A-Za-z_]\w*", tok) or tok in _KEYWORDS:
            raise KernelSyntaxError(f"expected identifier, found {tok!r}", ln, col)
        return tok

    def integer(self) -> int:
        ln, col = self.where()
        tok = self.next()
        if not tok.isdigit():
            raise KernelSyntaxError(f"expected integer, found {tok!r}", ln, col)
        return int(tok)


def parse_kernel(text: str) -> KernelDef:
    """Parse kernel source into its definition."""
    lx = _Lexer(text)
    preamble: list[str] = []
    while lx.peek() == "scalar":
        lx.next()
        name = lx.ident()
        if name in preamble:
            raise KernelSyntaxError(f"scalar {name!r} declared twice", *lx.where())
        preamble.append(name)
        lx.expect(";")

    loops: list[LoopDef] = []
    statements: list[StatementDef] = []

    def parse_access() -> Access:
        name = lx.ident()
        indices: list[str] = []
        while lx.peek() == "[":
            lx.next()
            ln, col = lx.where()
            part = lx.next()
            if not (part.isdigit() or re.fullmatch(r"[A-Za-z_]\w*", part)):
                raise KernelSyntaxError(f"bad index {part!r}", ln, col)
            if not part.isdigit() and part not in {l.control_var for l in loops}:
                raise UndeclaredVariable(
                    f"index variable {part!r} is not an enclosing loop variable",
                    ln,
                    col,
                )
            indices.append(part)
            lx.expect("]")
        return Access(name, tuple(indices))

    def parse_nest():
        lx.expect("for")
        ln, col = lx.where()
        var = lx.ident()
        if var in {l.control_var for l in loops}:
            raise KernelSyntaxError(f"loop variable {var!r} reused", ln, col)
        lx.expect("<")
        ln, col = lx.where()
        bound = lx.integer()
        if bound < 1:
            raise KernelSyntaxError(f"loop bound must be at least 1", ln, col)
        loops.append(LoopDef(var, bound))
        lx.expect("{")
        if lx.peek() == "for":
            parse_nest()
            if lx.peek() != "}":
                raise NonNestedLoops(
                    "statements or a second loop beside a nested loop",
                    *lx.where(),
                )
        else:
            while lx.peek() not in (None, "}"):
                if lx.peek() == "for":
                    raise NonNestedLoops(
                        "a loop beside statements is not supported", *lx.where()
                    )
                write = parse_access()
                lx.expect("=")
                reads = [parse_access()]
                while lx.peek() == "*":
                    lx.next()
                    reads.append(parse_access())
                lx.expect(";")
                statements.append(StatementDef(write, tuple(reads)))
        lx.expect("}")

    if lx.peek() is None:
        raise KernelSyntaxError("kernel has no loop nest", *lx.where())
    parse_nest()
    if lx.peek() is not None:
        raise NonNestedLoops("trailing input after the loop nest", *lx.where())
    return KernelDef(tuple(preamble), tuple(loops), tuple(statements))


def lower_kernel(
    kernel: KernelDef, template: EmissionTemplate = DEFAULT_TEMPLATE
) -> AnnotatedTrace:
    """Lower a kernel to its loop-annotated trace."""

    def emit_access(acc: Access, out: list[Token]):
        if acc.is_array:
            if template.index_loads:
                out.extend(
                    Ref(Symbol(part)) for part in acc.indices if not part.isdigit()
                )
            out.append(Ref(Symbol(acc.name, acc.indices)))
        else:
            out.append(Ref(Symbol(acc.name)))

    body: list[Token] = []
    for st in kernel.statements:
        if template.write_after_reads:
            for acc in st.reads:
                emit_access(acc, body)
            emit_access(st.write, body)
        else:
            emit_access(st.write, body)
            for acc in st.reads:
                emit_access(acc, body)

    inner = body
    for loop in reversed(kernel.loops):
        ctl = Ref(Symbol(loop.control_var))
        wrapped: list[Token] = []
        if template.loop_init_store:
            wrapped.append(ctl)
        wrapped.append(LoopOpen(loop.bound, loop.control_var))
        if template.loop_condition_load:
            wrapped.append(ctl)
        wrapped.extend(inner)
        wrapped.extend([ctl] * template.loop_increment_loads)
        wrapped.append(LoopClose())
        if template.loop_exit_load:
            wrapped.append(ctl)
        inner = wrapped

    tokens: list[Token] = [Ref(Symbol(s)) for s in kernel.preamble_symbols]
    tokens.extend(inner)
    return AnnotatedTrace.from_tokens(tokens)
