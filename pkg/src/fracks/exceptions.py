class ConfigurationError(ValueError):
    """Invalid grid, parameter or experiment configuration."""


class GridMismatchError(ValueError):
    """Operands live on incompatible grids or dimensions."""


class ResolutionError(RuntimeError):
    """A computation ran out of resolution (non-finite values, overflowed support)."""


class InsufficientDataError(ValueError):
    """Too few samples or shells for a fit or ratio to be defined."""
