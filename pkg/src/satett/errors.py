"""Exception types shared across the package."""


class SatettError(Exception):
    """Base class for all package errors."""


class SchemaError(SatettError):
    """A required column or config key is missing or malformed."""


class DomainError(SatettError):
    """A value lies outside its admissible domain (e.g. non-binary arm)."""


class EmptyInputError(SatettError):
    """Input contained no data rows."""


class NotFoundError(SatettError):
    """A requested subgroup or key does not exist in the data."""


class InsufficientDataError(SatettError):
    """Too few observations for the requested fit or estimate."""


class RankDeficiencyError(SatettError):
    """Singular normal equations; a positive ridge would regularize."""


class ConditioningError(SatettError):
    """A kernel matrix stayed non-positive-definite after jitter escalation."""


class GenerationError(SatettError):
    """A simulation rejection loop exceeded its attempt bound."""


class OutOfScopeError(SatettError):
    """A recognized but unsupported method id was requested."""


class ConfigError(SatettError):
    """Harness configuration failed validation."""
