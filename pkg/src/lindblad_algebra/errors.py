"""Exception types raised across the package."""


class LindbladAlgebraError(ValueError):
    """Base class for all errors raised by this package."""


class DimensionError(LindbladAlgebraError):
    """Operands have incompatible or non-square shapes."""


class ShapeError(LindbladAlgebraError):
    """An operand lacks a required structural property (e.g. Hermiticity)."""


class SingularMatrixError(LindbladAlgebraError):
    """A matrix that must be invertible (or full rank) is not."""


class DomainError(LindbladAlgebraError):
    """An argument lies outside the admissible range."""
