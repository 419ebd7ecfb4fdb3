"""Exception hierarchy shared by all modules."""


class PropselectError(Exception):
    """Base class for all library errors."""


class InputError(PropselectError):
    """Malformed user input: unknown ids, bad parameter values."""


class ContractError(PropselectError):
    """A documented precondition was violated by the caller."""


class ParseError(PropselectError):
    """PabuLib or side-file parsing failed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ScaleRefusal(PropselectError):
    """Instance too large for a brute-force verifier."""


class InternalError(PropselectError):
    """A runtime invariant of a rule broke; indicates a bug, not bad input."""
