"""Exception hierarchy shared by all lecsim modules."""


class LecsimError(Exception):
    """Base class for all lecsim errors."""


class DataError(LecsimError):
    """Invalid meter data: negative values, NaN, duplicates, schema violations."""


class AlignmentError(DataError):
    """Time series do not share start, resolution, and length."""


class ConfigError(LecsimError):
    """Invalid or unknown configuration key / value."""


class UsageError(LecsimError):
    """An operation was called with the wrong ledger mode or incompatible inputs."""


class UndefinedMetric(LecsimError):
    """A metric's denominator is zero (or too few values); reported as absent, not 0."""


class InvariantViolation(LecsimError):
    """An internal accounting identity failed; indicates a bug, not bad input."""
