"""Exception types raised across the package."""


class EntroboundError(Exception):
    """Base class for all package errors."""


class DomainError(EntroboundError, ValueError):
    """An input lies outside the domain of the requested operation."""


class InfeasibleError(DomainError):
    """Scalar parameters violate the trace-distance / eigenvalue constraint."""


class ConvergenceError(EntroboundError, ArithmeticError):
    """The Jacobi eigensolver did not reach its tolerance within the sweep cap.

    ``residual`` carries the off-diagonal Frobenius mass left when it stopped.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class MatrixFormatError(EntroboundError, ValueError):
    """A matrix file does not follow the ``{"dim", "entries"}`` JSON layout."""
