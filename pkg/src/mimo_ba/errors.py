"""Exception types raised across the package."""


class MimoBaError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MimoBaError, ValueError):
    pass


class DimensionError(MimoBaError, ValueError):
    pass


class PreconditionError(MimoBaError, ValueError):
    pass


class DomainError(MimoBaError, ValueError):
    pass


class UnsupportedResolutionError(MimoBaError, ValueError):
    """Requested ADC resolution lies outside the quantizer table."""


class InfeasibleBudgetError(MimoBaError):
    """No bit vector fits inside the ADC power budget."""


class NumericalSingularityError(MimoBaError, ArithmeticError):
    """A matrix that must be inverted is singular or badly conditioned."""
