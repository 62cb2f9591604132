"""Exception types shared across the package."""


class CatchupError(Exception):
    """Base class for all data and modelling errors raised by this package."""


class GradeError(CatchupError):
    """A value is not usable as a grade in the requested operation."""


class DataFormatError(CatchupError):
    """An input record file violates the expected format."""


class FitError(CatchupError):
    """A model cannot be fitted (usually: too few training rows)."""


class EvalError(CatchupError):
    """A Monte Carlo evaluation run cannot be completed."""


class NoNeighborsError(CatchupError):
    """A neighbor class came out empty (e.g. an epsilon ball with no members)."""


class CohortTooSmallError(CatchupError):
    """A cohort is too small to support the requested engine."""
