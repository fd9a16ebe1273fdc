"""Exception types raised across the package."""


class ScrewLQRError(Exception):
    """Base class for all package errors."""


class ChartSingularity(ScrewLQRError):
    """Exponential coordinates left the chart where dexp^-1 is defined."""

    def __init__(self, message, knot=None, partial=None):
        super().__init__(message)
        self.knot = knot
        self.partial = partial


class AngleAtBranchBoundary(ScrewLQRError):
    """Rotation angle too close to pi for the principal logarithm."""


class RiccatiDivergence(ScrewLQRError):
    pass


class TimeOutOfHorizon(ScrewLQRError):
    pass


class GridMismatch(ScrewLQRError):
    pass


class NonFiniteState(ScrewLQRError):
    def __init__(self, message, knot=None, partial=None):
        super().__init__(message)
        self.knot = knot
        self.partial = partial


class ConfigError(ScrewLQRError):
    """Invalid run configuration; ``field`` is a dotted path, ``line`` is 1-based."""

    def __init__(self, field, message, line=None):
        self.field = field
        self.line = line
        loc = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}{loc}: {message}")
