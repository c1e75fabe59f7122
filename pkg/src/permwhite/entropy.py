"""Entropy sources feeding permutation generation and per-chunk selection.

Three kinds are provided:

* ``OsEntropy`` -- the operating system CSPRNG (``os.urandom``).
* ``SeedFileSource`` -- raw bytes consumed strictly sequentially from a file;
  draws fail once the file is exhausted (silent wrap-around would correlate
  later draws with earlier ones).
* ``CounterSource`` -- a deterministic keyed keystream for reproducible runs.

The deterministic keystream is pinned so independent implementations can
reproduce it exactly:

    key   = SHA-256(key material)                     (32 bytes)
    block(i) = SHAKE-256(key || i as 8-byte big-endian) -> 8192 bytes
    stream = block(c0) || block(c0 + 1) || ...

where ``c0`` is the starting counter. String key material is UTF-8 encoded
before hashing.

Integer draws use rejection sampling: a draw from ``[lo, hi]`` with span
``s = hi - lo + 1`` reads ``ceil(k/8)`` bytes per attempt, where ``k`` is the
bit length of ``s - 1``, interprets them big-endian, masks to the low ``k``
bits, and rejects values ``>= s``. Power-of-two spans never reject, so their
byte consumption is exactly ``ceil(k/8)`` per draw. A degenerate span
(``lo == hi``) consumes nothing.
"""

from __future__ import annotations

import hashlib
import os
from typing import BinaryIO, Union

import numpy as np

from .errors import EntropyExhausted

_BLOCK_BYTES = 8192


class EntropySource:
    """Common draw logic; subclasses supply ``read_bytes``."""

    kind: str

    def read_bytes(self, n: int) -> bytes:
        raise NotImplementedError

    def random_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], inclusive, via rejection sampling."""
        if lo > hi:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        if span == 1:
            return lo
        k = (span - 1).bit_length()
        nbytes = (k + 7) // 8
        mask = (1 << k) - 1
        while True:
            v = int.from_bytes(self.read_bytes(nbytes), "big") & mask
            if v < span:
                return lo + v

    def random_index(self, m: int) -> int:
        """Uniform index in [0, m-1]; the per-chunk pool-selection draw."""
        if m < 1:
            raise ValueError("m must be >= 1")
        return self.random_int(1, m) - 1

    def random_indices(self, m: int, count: int) -> np.ndarray:
        """``count`` independent draws of ``random_index(m)`` as a uint32 array.

        For power-of-two ``m`` the draws are batched (one contiguous read);
        the byte consumption and results are identical to ``count`` scalar
        calls because such spans never reject.
        """
        if m < 1:
            raise ValueError("m must be >= 1")
        if count < 0:
            raise ValueError("count must be >= 0")
        if m == 1:
            return np.zeros(count, dtype=np.uint32)
        k = (m - 1).bit_length()
        nbytes = (k + 7) // 8
        if m == (1 << k) and nbytes in (1, 2, 4) and count > 0:
            raw = self.read_bytes(nbytes * count)
            arr = np.frombuffer(raw, dtype=f">u{nbytes}").astype(np.uint32)
            return arr & np.uint32((1 << k) - 1)
        out = np.empty(count, dtype=np.uint32)
        for i in range(count):
            out[i] = self.random_int(1, m) - 1
        return out


class OsEntropy(EntropySource):
    kind = "os"

    def read_bytes(self, n: int) -> bytes:
        return os.urandom(n)


class SeedFileSource(EntropySource):
    """Sequential reader over a raw seed file. No header, no wrap-around."""

    kind = "seed-file"

    def __init__(self, source: Union[str, os.PathLike, BinaryIO]):
        if hasattr(source, "read"):
            self._fh = source
            self._owns = False
        else:
            self._fh = open(source, "rb")
            self._owns = True
        self.offset = 0

    def read_bytes(self, n: int) -> bytes:
        parts = []
        remaining = n
        while remaining > 0:
            chunk = self._fh.read(remaining)
            if not chunk:
                raise EntropyExhausted(
                    f"seed file exhausted at offset {self.offset} "
                    f"({n - remaining} of {n} bytes available)"
                )
            parts.append(chunk)
            remaining -= len(chunk)
            self.offset += len(chunk)
        return b"".join(parts)

    def close(self) -> None:
        if self._owns:
            self._fh.close()


class CounterSource(EntropySource):
    """Deterministic SHAKE-256 counter keystream (see module docstring)."""

    kind = "deterministic-counter"

    def __init__(self, key: Union[str, bytes] = "permwhite", counter_start: int = 0):
        if isinstance(key, str):
            key = key.encode("utf-8")
        self._key = hashlib.sha256(key).digest()
        self._counter = counter_start
        self._buf = b""
        self._off = 0

    def _block(self, index: int) -> bytes:
        return hashlib.shake_256(self._key + index.to_bytes(8, "big")).digest(_BLOCK_BYTES)

    def read_bytes(self, n: int) -> bytes:
        avail = len(self._buf) - self._off
        if n <= avail:
            out = self._buf[self._off:self._off + n]
            self._off += n
            return out
        parts = [self._buf[self._off:]]
        need = n - avail
        while need > _BLOCK_BYTES:
            parts.append(self._block(self._counter))
            self._counter += 1
            need -= _BLOCK_BYTES
        self._buf = self._block(self._counter)
        self._counter += 1
        parts.append(self._buf[:need])
        self._off = need
        return b"".join(parts)


def make_source(
    kind: str,
    seed_file: Union[str, os.PathLike, BinaryIO, None] = None,
    det_key: Union[str, bytes] = "permwhite",
    det_counter: int = 0,
) -> EntropySource:
    """Build a source from CLI-style parameters."""
    if kind == "os":
        return OsEntropy()
    if kind == "seed":
        if seed_file is None:
            raise ValueError("seed source requires a seed file path")
        return SeedFileSource(seed_file)
    if kind == "det":
        return CounterSource(det_key, det_counter)
    raise ValueError(f"unknown entropy source kind: {kind!r}")
