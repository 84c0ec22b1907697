"""Exception types raised across the package.

Everything derives from PairCorrError so callers can catch the package's
failures with a single except clause while letting programming errors
(TypeError, etc.) propagate.
"""


class PairCorrError(Exception):
    """Base class for all package-specific errors."""


class DegenerateChannelError(PairCorrError):
    """The antisymmetric pair state vanishes (splitting momentum ~ 0).

    Raised by model-level densities and amplitudes when the triplet
    combination is requested with a splitting momentum below the
    degeneracy threshold. Correlation functions do not raise this; they
    return the well-defined limit instead.
    """


class ToleranceNotMetError(PairCorrError):
    """An oracle exhausted its sample budget above the requested tolerance.

    Carries the partial estimate in the ``result`` attribute.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class UnsupportedMethodError(PairCorrError):
    """The requested quadrature method does not apply to this integral."""


class InsufficientDataError(PairCorrError):
    """Too few data points for the number of free fit parameters."""


class InsufficientSensitivityError(PairCorrError):
    """Every fit start collapsed onto the zero-correlation ridge.

    The model predicts an identically vanishing correlation there, so
    the data carry no information about the free parameters.
    """


class NonConvergenceError(PairCorrError):
    """No optimizer start converged. ``result`` holds the best attempt."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class UndefinedMetricError(PairCorrError):
    """A relative quality metric was requested for all-zero reference data."""


class DataFormatError(PairCorrError):
    """A dataset file violates the expected CSV layout.

    ``line`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

    def __str__(self):
        base = super().__str__()
        return base if self.line is None else f"line {self.line}: {base}"
