"""Exception types shared across the package."""


class HolodynError(Exception):
    """Base class. ``code`` is a module-qualified identifier used by the CLI."""

    code = "holodyn.error"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class TruncationError(HolodynError, ValueError):
    """Operands carry incompatible truncation degrees (a usage error)."""

    code = "coeff_jet.truncation_mismatch"


class DomainError(HolodynError, ValueError):
    """An operation was applied outside its mathematical domain."""

    code = "domain"


class ParseError(HolodynError, ValueError):
    """Malformed expression text; ``position`` is a 0-based column."""

    code = "cli.parse"

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None and text is not None:
            message = f"{message} at column {position + 1}\n  {text}\n  {' ' * position}^"
        super().__init__(message)
