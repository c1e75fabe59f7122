"""Exception types shared across the toolkit."""


class PermwhiteError(Exception):
    """Base class for all toolkit errors."""


class FormatError(PermwhiteError):
    """A pool or trace file is malformed: bad magic, version, CRC, or content."""


class EntropyExhausted(PermwhiteError):
    """A seed file ran out of bytes mid-draw."""


class PreconditionError(PermwhiteError):
    """Input does not meet a statistical test's minimum-size requirement."""
