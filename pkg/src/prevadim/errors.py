class PrevadimError(Exception):
    """Base class for library errors."""


class ConfigError(PrevadimError, ValueError):
    """A configuration field is missing or outside its domain."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConstructionError(PrevadimError, ValueError):
    """The interval schedule cannot be realised (children do not fit in parents)."""

    def __init__(self, level, message):
        self.level = level
        super().__init__(f"level {level}: {message}")


class DomainError(PrevadimError, ValueError):
    """An argument is outside the domain where the operation is defined."""


class SamplingError(PrevadimError, RuntimeError):
    """A sampler kept producing degenerate draws."""
