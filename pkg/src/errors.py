class FractalError(Exception):
    """Base class for every error raised by the fractal-interior package"""


class InvalidArgumentError(FractalError, ValueError):
    """An operation was called outside its precondition"""


class ConfigError(FractalError):
    """An environment setting could not be parsed"""


class ResourceLimitError(FractalError):
    """A configured word, node or pixel budget would be exceeded"""

    def __init__(self, message: str, limit: int, requested: int | None = None):
        super().__init__(message)
        self.limit = limit
        self.requested = requested


class MatchingInfeasibleError(FractalError):
    """
    The window-by-window matching of a fibre certificate ran out of zeros.

    Carries the failing window index k together with the number of unused zero
    positions that were available and the number the window needed.
    """

    def __init__(self, k: int, available: int, needed: int):
        super().__init__(
            f"window W_{k} needs {needed} zero positions but only {available} are available"
        )
        self.k = k
        self.available = available
        self.needed = needed


class GapNotFoundError(FractalError):
    """No certifiable gap was found before epsilon reached the configured floor"""

    def __init__(self, message: str, last_epsilon):
        super().__init__(message)
        self.last_epsilon = last_epsilon
