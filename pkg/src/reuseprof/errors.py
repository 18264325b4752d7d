"""Exception types shared across the package."""


class ReuseProfError(Exception):
    """Base class for all errors raised by this package."""


class TraceFormatError(ReuseProfError, ValueError):
    """Bracketed trace text that cannot be parsed or validated."""


class UnbalancedBrackets(TraceFormatError):
    pass


class MalformedToken(TraceFormatError):
    pass


class UnknownIndexVariable(TraceFormatError):
    """Array reference indexed by a variable with no enclosing loop."""


class MissingBound(ReuseProfError, ValueError):
    """Bound vector does not cover the trace's loop variables exactly."""


class SizeLimitExceeded(ReuseProfError):
    """Flattened trace would exceed the symbol cap; extrapolate instead."""


class KernelSyntaxError(ReuseProfError, ValueError):
    """Kernel source that does not match the DSL grammar."""

    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = f"line {line}, column {col}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


class UndeclaredVariable(KernelSyntaxError):
    pass


class NonNestedLoops(KernelSyntaxError):
    """Sibling loops, or statements beside a nested loop."""


class UnsupportedLoopDepth(ReuseProfError):
    """Extrapolation handles one to three nested loops only."""


class InconsistentSamples(ReuseProfError):
    """Sampled histograms do not admit the stable/volatile decomposition."""


class NonlinearResidual(ReuseProfError):
    """A bin classified stable fails validation at a probe sample."""


class NonAffineDilation(ReuseProfError):
    """Volatile block start or size is not affine in the swept bound."""


class EmptyList(ReuseProfError):
    """Dilation fitting needs non-empty volatile lists."""


class NegativeFrequency(ReuseProfError):
    """A fitted model produced a negative frequency."""


class InvalidConfig(ReuseProfError, ValueError):
    """Cache geometry that is not internally consistent."""


class EmptyHistogram(ReuseProfError):
    """Hit rate of an empty histogram is undefined."""
