"""Exception hierarchy. Every error raised on bad input is an ``InputError``."""


class DobrushinLabError(Exception):
    pass


class InputError(DobrushinLabError, ValueError):
    """Malformed or out-of-contract input."""


class EnumerationTooLarge(InputError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"exact enumeration of {count} configurations exceeds the cap of {cap}")
        self.count = count
        self.cap = cap


class PositivityViolation(InputError):
    """A probability that must be strictly positive is zero."""


class InvalidConditioning(InputError):
    """Conditioning on an event of zero probability."""


class GuardFailure(InputError):
    """A caller-supplied bounded-differences certificate failed its spot check."""


class SchemaError(InputError):
    """A configuration or model document does not match its schema."""
