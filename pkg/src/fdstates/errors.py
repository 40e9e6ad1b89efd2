"""Exceptions raised by fdstates."""


class FdStatesError(Exception):
    """Base class for all fdstates errors."""


class InvalidDimensionError(FdStatesError, ValueError):
    """Raised when a Hilbert-space dimension is not a positive integer."""


class InvalidStateError(FdStatesError, ValueError):
    """Raised for states or density matrices that violate their invariants."""


class NumericError(FdStatesError, ValueError):
    """Raised when an operator contains non-finite entries."""


class ResonanceError(FdStatesError, ValueError):
    """Raised when the B series hits a pole ``n + a = 0`` with ``c_n != 0``."""


class UnsupportedOrderError(FdStatesError, ValueError):
    """Raised when a polynomial order is outside the supported range."""


class MissingPeriodError(FdStatesError, ValueError):
    """Raised when a periodic quantity is requested without a period."""


class InvalidDampingError(FdStatesError, ValueError):
    """Raised for a negative damping constant."""


class UnsupportedEnvelopeError(FdStatesError, ValueError):
    """Raised when an engine cannot handle the envelope of a model."""


class IntegrationError(FdStatesError, RuntimeError):
    """Raised when the ODE integrator fails, e.g. on step-size underflow."""


class SchemaError(FdStatesError, ValueError):
    """Raised when a scenario configuration is malformed.

    Attributes:
        field (str): Name of the offending configuration field.
    """

    def __init__(self, field, message):
        super().__init__("Invalid field '%s': %s" % (field, message))
        self.field = field


class ConfigurationError(FdStatesError, ValueError):
    """Raised when a valid configuration combines incompatible choices."""
