"""Exception types shared across the package."""


class ChainrepError(Exception):
    """Base class for all library errors."""


class InputError(ChainrepError):
    """Raised for malformed user input (bad signatures, bad flags, bad files)."""


class ParseError(InputError):
    """Raised when formula text cannot be parsed.

    Carries the offending text and a character position.
    """

    def __init__(self, message: str, text: str = "", pos: int = -1):
        self.text = text
        self.pos = pos
        if pos >= 0:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class ResourceLimitError(ChainrepError):
    """Raised when a configured state or element budget would be exceeded."""

    def __init__(self, message: str, budget=None, subject=None):
        self.budget = budget
        self.subject = subject
        super().__init__(message)
