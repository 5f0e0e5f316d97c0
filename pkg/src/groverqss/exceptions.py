class ConfigurationError(ValueError):
    """Bad dimensions, indices, or scenario fields."""


class ProtocolOrderError(RuntimeError):
    """A protocol phase was invoked before its prerequisites completed."""
