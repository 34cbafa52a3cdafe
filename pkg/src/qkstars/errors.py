"""Exception and warning types shared across the package."""


class CapacityError(ValueError):
    """Requested simulator size is outside the supported range."""


class EncodingDomainError(ValueError):
    """A feature value lies outside the feature map's scaling interval."""


class SchemaError(ValueError):
    """Input table is missing required columns."""


class ValidationError(ValueError):
    """Configuration or inputs are inconsistent."""


class ConvergenceWarning(UserWarning):
    """An iterative solver stopped before meeting its tolerance."""
