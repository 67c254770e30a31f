class DomainError(ValueError):
    """An input lies outside the domain where a quantity is defined."""


class DegenerateInputError(DomainError):
    """The input is valid but degenerate for the requested diagnostic."""


class ConfigError(ValueError):
    """A run configuration is malformed; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
