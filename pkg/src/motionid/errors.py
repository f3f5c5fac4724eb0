"""Exception types shared across the package.

Plain invalid arguments raise ValueError; missing lookups raise KeyError.
The classes below exist so the CLI can map failures to distinct exit codes.
"""


class MotionIdError(Exception):
    """Base class for errors raised by this package."""


class DataFormatError(MotionIdError):
    """A data file violates the on-disk format (bad row, shape mismatch, duplicate key)."""

    def __init__(self, message: str, path=None, line: int | None = None):
        loc = str(path) if path is not None else ""
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class ConfigError(MotionIdError):
    """An experiment configuration is invalid or inconsistent."""


class ConvergenceError(MotionIdError):
    """The SVM solver stopped before reaching the requested tolerance."""

    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap
