"""Exception types shared across the toolkit."""


class GravMziError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(GravMziError, ValueError):
    """A parameter or configuration file violates an invariant.

    ``field`` names the offending entry when known, so scenario files can be
    diagnosed without a traceback.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class GeometryMismatchError(GravMziError, ValueError):
    """Two spools that must share geometry do not."""


class ConvergenceError(GravMziError, RuntimeError):
    """An iterative routine exhausted its refinement budget."""


class NoSignalError(GravMziError, ZeroDivisionError):
    """The requested estimate has zero signal (e.g. P equals the calibration
    probability, so the Poisson bound diverges)."""


class UnsupportedBandError(GravMziError, ValueError):
    """A frequency band falls outside the support of a PSD model."""


class InsufficientDataError(GravMziError, ValueError):
    """A count record set is too short for the requested analysis."""
