"""Exception types raised by the xi bootstrap toolkit."""
from typing import Optional


class XiBootError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(XiBootError, ValueError):
    """An argument or configuration value is out of range."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class PreconditionError(XiBootError, ValueError):
    """The input does not satisfy an operation's precondition (e.g. ties)."""


class DegenerateSampleError(PreconditionError):
    """All Y values are tied, so the xi denominator vanishes."""


class OracleError(XiBootError, RuntimeError):
    """A numerical oracle failed to reach its requested accuracy."""


class VerificationError(XiBootError):
    """One or more theory checks failed their tolerance."""

    def __init__(self, failures):
        names = ", ".join(check.name for check in failures)
        super().__init__(f"{len(failures)} check(s) failed: {names}")
        self.failures = list(failures)


class DataFileError(XiBootError, OSError):
    """A data file could not be read or parsed."""

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line
