"""Exception types raised by the detector-response engine."""

from typing import Optional


class DetectorError(Exception):
    """Base class for every error raised by ctc-detector."""


class InvalidRegulatorError(DetectorError, ValueError):
    """The i-epsilon regulator is not strictly positive."""


class InvalidGeometryError(DetectorError, ValueError):
    """Geometry parameters outside their allowed range."""


class ChronologyViolationError(DetectorError, ValueError):
    """A proper time lies outside the no-CTC window |tau| <= 1/W."""


class UndefinedSplitError(DetectorError, ValueError):
    """Regular part requested for a geometry without a stationary split."""


class ConfigurationError(DetectorError, ValueError):
    """Invalid quadrature, sweep or environment configuration."""


class LadderError(DetectorError, ValueError):
    """An epsilon ladder unsuitable for extrapolation."""


class TailBoundError(DetectorError, ValueError):
    """Mode sum truncated before the Gaussian tail is negligible."""


class SweepFileError(DetectorError, ValueError):
    """A sweep CSV does not match the expected schema."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConvergenceError(DetectorError, RuntimeError):
    """Adaptive quadrature gave up before meeting its tolerance."""

    def __init__(self, message: str, estimate=None, error_bound: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
