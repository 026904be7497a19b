"""Exception hierarchy shared across the package."""


class ZeroOneError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ZeroOneError):
    """Invalid data passed to an operation: bad shapes, labels, or a
    violated precondition."""


class ConfigError(ZeroOneError):
    """Invalid kernel or solver configuration."""


class ParseError(ZeroOneError):
    """Malformed dataset file.  ``line`` holds the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(ZeroOneError):
    """Linear-algebra failure.  ``cond`` carries a condition-number
    estimate of the offending system when one is available."""

    def __init__(self, message: str, cond: float | None = None):
        if cond is not None:
            message = f"{message} (condition estimate {cond:.3e})"
        super().__init__(message)
        self.cond = cond
