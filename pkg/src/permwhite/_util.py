"""Small shared stream-reading helpers."""

from .errors import FormatError

BLOCK_BYTES = 1 << 20


def read_up_to(source, n: int) -> bytes:
    """Read up to n bytes, looping over short reads; shorter only at EOF."""
    parts = []
    remaining = n
    while remaining > 0:
        chunk = source.read(remaining)
        if not chunk:
            break
        parts.append(chunk)
        remaining -= len(chunk)
    return b"".join(parts)


def read_exact(source, n: int, what: str) -> bytes:
    """Read exactly n bytes or raise FormatError naming the missing piece."""
    got = read_up_to(source, n)
    if len(got) != n:
        raise FormatError(f"truncated file while reading {what}")
    return got
