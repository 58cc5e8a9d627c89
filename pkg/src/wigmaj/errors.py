"""Exception hierarchy shared by every wigmaj module."""


class WigmajError(Exception):
    """Base class for all library errors."""


class CapacityError(WigmajError):
    """A configured size limit (polynomial degree, sampling budget) was exceeded."""


class DomainError(WigmajError, ValueError):
    """Input outside the mathematical domain of an operation."""


class NormalizationError(WigmajError, ValueError):
    """Total masses that must agree do not."""


class RepresentationError(WigmajError, TypeError):
    """Operands use incompatible representations (e.g. mismatched grids)."""


class ContractError(WigmajError):
    """A documented precondition of a certification routine does not hold."""


class CertificationError(WigmajError):
    """A certification step failed; carries the worst residual found."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SamplingBudgetError(CapacityError):
    """Rejection sampling gave up before finding an admissible state."""
