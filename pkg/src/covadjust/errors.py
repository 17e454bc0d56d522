"""Exception types raised across the package."""


class CovAdjustError(Exception):
    """Base class for all package errors."""


class NotPositiveDefinite(CovAdjustError):
    """A Cholesky pivot was zero or negative."""


class InsufficientRows(CovAdjustError):
    pass


class ParseError(CovAdjustError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingValue(ParseError):
    pass


class DuplicateHeader(ParseError):
    pass


class UnknownColumn(CovAdjustError):
    def __init__(self, name):
        super().__init__(f"unknown column: {name!r}")
        self.name = name


class DegenerateColumn(CovAdjustError):
    """A column is constant or linearly dependent on earlier ones."""


class RankDeficient(CovAdjustError):
    """The design matrix is (numerically) collinear."""


class ZeroVariance(CovAdjustError):
    pass


class NonPositiveSd(CovAdjustError):
    pass


class ConfigError(CovAdjustError):
    pass


class IllConditionedWarning(UserWarning):
    """A Cholesky pivot is tiny relative to the largest diagonal entry."""


class SuppressionWarning(UserWarning):
    """The shared (lacuna) area came out negative."""
