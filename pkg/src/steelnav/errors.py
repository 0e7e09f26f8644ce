"""Exception types shared across the package."""


class NavError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(NavError):
    """A cloud file could not be parsed.

    Carries the offending path and 1-based line number so callers can point
    at the exact spot in the file.
    """

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class DomainError(NavError):
    """An operation was called outside its domain (empty cloud, n too large, ...)."""


class DegenerateAnchorError(DomainError):
    """A candidate rectangle anchor coincides with the patch centroid."""


class TransitionError(NavError):
    """An event is not legal in the current locomotion phase."""


class TrajectoryError(NavError):
    """A planned joint trajectory violates the configured joint limits."""


class ConfigError(NavError):
    """A configuration file or value is invalid."""
