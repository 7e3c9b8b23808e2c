"""Exception types raised by the estimator pipeline."""


class RobustMeanError(Exception):
    """Base class for all package errors."""


class InvalidInput(RobustMeanError, ValueError):
    """Malformed data, configuration or file."""


class InsufficientSamples(RobustMeanError, ValueError):
    """Fewer than 2k samples are available for 2k buckets."""


class DegenerateData(RobustMeanError):
    """Every bucket mean coincides with the centering point, so no scale exists."""


class ZeroMatrix(RobustMeanError):
    """All weighted rows are zero; no top singular direction exists."""


class InfeasibleCap(RobustMeanError, ValueError):
    """The cap is too small for any distribution to satisfy it (cap * k' < 1)."""


class NoMargin(RobustMeanError):
    """Every margin on the search grid failed."""
