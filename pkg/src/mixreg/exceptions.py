"""Exception hierarchy for mixreg."""


class MixregError(Exception):
    """Base class for all errors raised by this package."""


class InvalidGridError(MixregError, ValueError):
    pass


class DimensionError(MixregError, ValueError):
    """Raised when two objects live on different grids or have mismatched shapes."""


class DegenerateRangeError(MixregError, ValueError):
    pass


class InvalidIntervalError(MixregError, ValueError):
    pass


class NonConvergenceError(MixregError, RuntimeError):
    """The inner linear system could not be solved.

    ``diagnostics`` carries whatever the solver knew at the time of failure
    (iteration, last objective value, matrix condition estimate).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NoBracketError(MixregError, RuntimeError):
    """Discrepancy at the ends of the alpha range does not bracket ``tau * delta``."""

    def __init__(self, message, low, high, target):
        super().__init__(message)
        self.low = low
        self.high = high
        self.target = target


class UndefinedMetricError(MixregError, ValueError):
    pass


class OracleSizeError(MixregError, ValueError):
    """The brute-force oracles refuse problems that would blow up combinatorially."""
