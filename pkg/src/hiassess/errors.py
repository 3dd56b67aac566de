"""Exception types raised across the package.

All of them subclass ValueError so callers that only care about "bad input"
can catch that.
"""


class InvalidParametersError(ValueError):
    """Degradation model parameters violate their invariants."""


class OutOfRangeError(ValueError):
    """A time index or window lies outside the model's [1, m] range."""


class DivisionHazardError(ValueError):
    """MAPE pattern value too close to zero to divide by."""

    def __init__(self, index: int, value: float, eps: float):
        self.index = index
        self.value = value
        super().__init__(
            f"|pattern[{index}]| = {abs(value):.3g} <= eps = {eps:.3g}; MAPE undefined"
        )


class ConfigError(ValueError):
    """Configuration is inconsistent or incomplete."""


class ParseError(ValueError):
    """Malformed input file. ``line`` is 1-based and counts the header."""

    def __init__(self, path, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")
