"""Exception hierarchy. Validation failures map to CLI exit code 1, I/O to 2."""


class OmiqError(Exception):
    """Base class for all omiq errors."""


class OmiqValidationError(OmiqError, ValueError):
    """Malformed input, broken invariant, or contract violation."""


class OmiqIOError(OmiqError, OSError):
    """File could not be read or written."""
