"""Exception types shared across the package.

The CLI maps these onto exit codes, so keep the hierarchy flat.
"""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class ValidationError(ValueError):
    """An input loop or configuration fails geometric validation."""


class ConvergenceError(RuntimeError):
    """An iterative or quadrature scheme did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")
        self.residual = residual


class NonFiniteError(ArithmeticError):
    """A computation produced NaN or infinite values."""


class BranchError(ConvergenceError):
    """A continuous branch of an argument could not be selected consistently."""
