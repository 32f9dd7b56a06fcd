"""Exception types shared across the package."""


class SpecconError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(SpecconError, ValueError):
    """Invalid argument or malformed input data."""


class GenerationError(SpecconError, RuntimeError):
    """Random graph generation exhausted its retry budget."""


class NumericalError(SpecconError, RuntimeError):
    """A numerical routine failed or produced an unusable result."""


class ConnectivityError(SpecconError, ValueError):
    """The graph (or its spectrum) is not connected enough for the operation."""
