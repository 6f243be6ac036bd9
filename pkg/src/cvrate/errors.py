"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input value lies outside the physically meaningful domain."""


class PhysicalityError(DomainError):
    """A state or spectrum violates the uncertainty principle."""


class UnsupportedCaseError(DomainError):
    """A structurally valid input falls outside the supported model class."""


class UsageError(ValueError):
    """Arguments are structurally inconsistent (shapes, indices, bounds)."""


class ConfigError(ValueError):
    """A configuration file is missing keys or contains unparseable values."""


class ConstraintError(RuntimeError):
    """An optimization constraint cannot be satisfied on the search domain."""
