"""Exception types shared across the package."""


class StateValidationError(ValueError):
    """An input violates a structural invariant (hermiticity, positivity, normalization, unitarity)."""


class UnsupportedParameterError(ValueError):
    """A parameter is outside the supported range (dimension caps, mode indices, grid limits)."""
