"""Random kernel generation for property testing and benchmarking.

Generated kernels are always valid DSL: distinct loop variables, every
array used with one fixed index signature, and indices that are bare
loop variables (optionally allowing small integer constants). A given
seed always produces the same text.
"""

from __future__ import annotations

import random

_LOOP_VARS = ("i", "j", "k")
_ARRAY_NAMES = "ABCDEFGH"


def generate_kernel(
    seed: int,
    levels: int,
    max_arrays: int = 3,
    max_statements: int = 3,
    allow_constant_index: bool = False,
) -> str:
    """Emit one random kernel as DSL source text."""
    if not 1 <= levels <= 3:
        raise ValueError(f"levels must be 1 to 3, got {levels}")
    rng = random.Random(seed)
    loop_vars = _LOOP_VARS[:levels]
    bounds = [rng.randint(10, 400) for _ in loop_vars]

    n_arrays = rng.randint(1, max_arrays)
    signatures: dict[str, tuple[str, ...]] = {}
    for name in _ARRAY_NAMES[:n_arrays]:
        ndims = rng.randint(1, 2) if levels >= 2 else 1
        sig = tuple(rng.sample(loop_vars, ndims))
        if allow_constant_index and rng.random() < 0.3:
            slot = rng.randrange(len(sig))
            sig = sig[:slot] + (str(rng.randint(0, 3)),) + sig[slot + 1 :]
            if not any(not p.isdigit() for p in sig):
                sig = sig + (rng.choice(loop_vars),)
        signatures[name] = sig

    names = list(signatures)

    def access(name: str) -> str:
        return name + "".join(f"[{p}]" for p in signatures[name])

    def random_read() -> str:
        if rng.random() < 0.35:
            return "alpha"
        return access(rng.choice(names))

    statements = []
    for _ in range(rng.randint(1, max_statements)):
        write = access(rng.choice(names))
        reads = [random_read() for _ in range(rng.randint(1, 2))]
        statements.append(f"{write} = {' * '.join(reads)};")

    lines = ["scalar retval;", "scalar alpha;"]
    for depth, (var, bound) in enumerate(zip(loop_vars, bounds)):
        lines.append("  " * depth + f"for {var} < {bound} {{")
    for st in statements:
        lines.append("  " * levels + st)
    for depth in range(levels - 1, -1, -1):
        lines.append("  " * depth + "}")
    return "\n".join(lines) + "\n"
