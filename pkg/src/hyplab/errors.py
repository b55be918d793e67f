"""Exception types shared across the package."""


class HyplabError(Exception):
    """Base class for all package errors."""


class DomainError(HyplabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(HyplabError, ValueError):
    """A configuration value violates a documented precondition."""


class EvaluationError(HyplabError, ArithmeticError):
    """A spectral function produced a non-finite value on the spectrum."""


class EigensolverError(HyplabError, RuntimeError):
    """The eigendecomposition failed; carries residual diagnostics."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IntegrationError(HyplabError, RuntimeError):
    """Time integration produced a non-finite state.

    ``last_snapshot`` holds the most recent finite snapshot, if any.
    """

    def __init__(self, message: str, last_snapshot=None):
        super().__init__(message)
        self.last_snapshot = last_snapshot


class RunError(HyplabError, RuntimeError):
    """A high-low run aborted; carries the partial ledger."""

    def __init__(self, message: str, partial_ledger=None):
        super().__init__(message)
        self.partial_ledger = partial_ledger


class StudyError(HyplabError, RuntimeError):
    """A scaling study had too few usable points."""
