"""Exception types shared across the package."""


class D2DCacheError(Exception):
    """Base class for all package errors."""


class ConfigurationError(D2DCacheError):
    """A constructor or evaluator was called with inconsistent parameters."""


class FieldDomainError(D2DCacheError):
    """Invalid finite-field operation (e.g. inverting zero)."""


class FeasibilityError(D2DCacheError):
    """The requested memory point is outside the feasible region."""


class ResourceBudgetError(D2DCacheError):
    """A transformation would exceed its subpacketization budget."""


class EncodingError(D2DCacheError):
    """A delivery signal cannot be expressed over the sender's cache rows."""


class InterchangeError(D2DCacheError):
    """A scheme document failed to load or serialize.

    ``field`` names the offending document field, ``line`` the offending
    line for text formats; either may be None.
    """

    def __init__(self, message, field=None, line=None):
        if field is not None:
            message = f"{message} (field: {field})"
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.field = field
        self.line = line
