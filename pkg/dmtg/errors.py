"""Exception hierarchy shared by all DMTG components."""


class DmtgError(Exception):
    """Base class for every error raised by the package."""


class ShapeError(DmtgError, ValueError):
    """Operands have incompatible shapes."""


class NonFiniteError(DmtgError, ArithmeticError):
    """A NaN or Inf entered or left a computation."""


class DomainError(DmtgError, ValueError):
    """An argument lies outside the domain of the operation."""


class GraphReleasedError(DmtgError, RuntimeError):
    """backward() was called on a graph that has already been consumed."""


class MissingGradientError(DmtgError, RuntimeError):
    """An optimizer step was requested for a parameter without a gradient."""


class SubspaceCapacityError(DmtgError, ValueError):
    """Planted group subspaces do not fit in the input dimension."""


class EnumerationLimitError(DmtgError, ValueError):
    """Too many tasks for exhaustive partition enumeration."""


class TrainingDivergedError(DmtgError, RuntimeError):
    """Training produced a non-finite loss."""


class ConfigError(DmtgError, ValueError):
    """An experiment configuration field is invalid."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class EmptyResultsError(DmtgError, FileNotFoundError):
    """No run records were found where some were expected."""
