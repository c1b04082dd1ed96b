"""Exception hierarchy shared across the pipeline.

Exit-code mapping used by the CLI: ValidationError -> 1,
TransportError -> 2, NumericError -> 3.
"""


class CclError(Exception):
    """Base class for all pipeline errors."""


class ValidationError(CclError, ValueError):
    """Bad inputs, violated invariants, or malformed files."""


class ParseError(ValidationError):
    """A record could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class IntegrityError(ValidationError):
    """Stored derived values disagree with their recomputation."""


class TransportError(CclError, RuntimeError):
    """Endpoint unreachable after bounded retries.

    ``completed`` counts the draws that finished before the failure.
    """

    def __init__(self, message: str, completed: int = 0):
        super().__init__(message)
        self.completed = completed


class NumericError(CclError, RuntimeError):
    """Non-finite loss or gradient encountered during optimization."""
