"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Invalid configuration value."""


class DomainError(ValueError):
    """Input outside an operation's mathematical domain."""
