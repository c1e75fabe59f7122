"""Stream whitening: frame a byte stream into N-bit chunks, permute each
chunk with a randomly selected pool member, and emit the result.

Output size always equals input size. A final partial chunk (possible only
when N > 8, since every byte then may not fill a whole chunk) is copied
through unchanged rather than padded or dropped. Selection draws are made
by the coordinator in chunk-ordinal order before any parallel dispatch, so
results never depend on scheduling.
"""

from __future__ import annotations

import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import BinaryIO, Optional

import numpy as np

from ._util import read_exact as _read_exact
from ._util import read_up_to as _read_up_to
from .entropy import EntropySource
from .errors import FormatError
from .permutation import MatrixPool

TRACE_MAGIC = b"PWTR"
TRACE_VERSION = 1
_TRACE_HEADER = struct.Struct("<4sHIQ")

_BATCH_TARGET_BYTES = 1 << 20


@dataclass
class WhitenConfig:
    """Defaults reproduce the flagship setup: 8192-bit chunks, 32 matrices."""

    n_qubits: int = 13
    pool_count: int = 32
    shuffle_mode: str = "fullrange"
    selection_source: str = "os"
    tail_policy: str = "passthrough"
    record_selections: bool = False


@dataclass
class SelectionTrace:
    """Pool index chosen for each full chunk, in chunk-ordinal order."""

    chunk_bits: int
    indices: np.ndarray

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.uint32)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SelectionTrace):
            return NotImplemented
        return self.chunk_bits == other.chunk_bits and bool(
            np.array_equal(self.indices, other.indices)
        )


def frame(input_bit_length: int, n_bits: int) -> tuple[int, int]:
    """Split a bit count into (full chunk count, tail bit count)."""
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    return input_bit_length // n_bits, input_bit_length % n_bits


def whiten_stream(
    input: BinaryIO,
    pool: MatrixPool,
    cfg: WhitenConfig,
    selector: EntropySource,
    output: BinaryIO,
    workers: int = 1,
) -> Optional[SelectionTrace]:
    """Whiten ``input`` into ``output``; returns the trace if recording."""
    if pool.size != 1 << cfg.n_qubits:
        raise ValueError(
            f"pool/config mismatch: pool chunk size {pool.size}, "
            f"config expects {1 << cfg.n_qubits}"
        )
    if pool.count != cfg.pool_count:
        raise ValueError(
            f"pool/config mismatch: pool has {pool.count} permutations, "
            f"config expects {cfg.pool_count}"
        )
    if cfg.tail_policy != "passthrough":
        raise ValueError(f"unknown tail policy: {cfg.tail_policy!r}")

    maps = [p.map for p in pool.permutations]
    recorded = [] if cfg.record_selections else None

    def draw(n_chunks: int) -> np.ndarray:
        sel = selector.random_indices(pool.count, n_chunks)
        if recorded is not None:
            recorded.append(sel)
        return sel

    _transform(input, output, pool.size, maps, draw, workers)

    if recorded is None:
        return None
    idx = np.concatenate(recorded) if recorded else np.empty(0, dtype=np.uint32)
    return SelectionTrace(chunk_bits=pool.size, indices=idx)


def unwhiten_stream(
    input: BinaryIO,
    pool: MatrixPool,
    trace: SelectionTrace,
    output: BinaryIO,
    workers: int = 1,
) -> None:
    """Invert a whitening run recorded in ``trace``; bit-exact recovery."""
    if trace.chunk_bits != pool.size:
        raise ValueError(
            f"trace chunk size {trace.chunk_bits} != pool chunk size {pool.size}"
        )
    if trace.indices.size and int(trace.indices.max()) >= pool.count:
        raise ValueError(
            f"trace selects index {int(trace.indices.max())} "
            f"but the pool holds only {pool.count} permutations"
        )
    inverse_maps = [p.invert().map for p in pool.permutations]
    consumed = 0

    def draw(n_chunks: int) -> np.ndarray:
        nonlocal consumed
        if consumed + n_chunks > trace.indices.size:
            raise ValueError(
                f"trace too short: {trace.indices.size} entries, "
                f"input has more than {consumed + n_chunks - 1} chunks"
            )
        sel = trace.indices[consumed:consumed + n_chunks]
        consumed += n_chunks
        return sel

    _transform(input, output, pool.size, inverse_maps, draw, workers)
    if consumed != trace.indices.size:
        raise ValueError(
            f"trace too long: {trace.indices.size} entries for {consumed} chunks"
        )


def _transform(input, output, chunk_bits, maps, draw, workers):
    """Shared streaming loop. ``draw(n)`` supplies pool indices per batch."""
    align = chunk_bits // 8 if chunk_bits >= 8 else 1
    batch_bytes = max(align, _BATCH_TARGET_BYTES // align * align)

    def process(buf: bytes, sel: np.ndarray) -> bytes:
        bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8))
        chunks = bits.reshape(-1, chunk_bits)
        out = np.empty_like(chunks)
        for m in np.unique(sel):
            rows = np.nonzero(sel == m)[0]
            out[rows] = chunks[rows][:, maps[m]]
        return np.packbits(out.ravel()).tobytes()

    def batches():
        while True:
            buf = _read_up_to(input, batch_bytes)
            if not buf:
                return
            full = len(buf) - len(buf) % align
            tail = buf[full:]
            n_chunks = full * 8 // chunk_bits
            yield buf[:full], draw(n_chunks), tail
            if len(buf) < batch_bytes:
                return

    if workers <= 1:
        for body, sel, tail in batches():
            if body:
                output.write(process(body, sel))
            if tail:
                output.write(tail)
        return

    with ThreadPoolExecutor(max_workers=workers) as pool_exec:
        pending = []
        for body, sel, tail in batches():
            pending.append((pool_exec.submit(process, body, sel) if body else None, tail))
            while len(pending) > workers + 1:
                _flush_one(pending, output)
        while pending:
            _flush_one(pending, output)


def _flush_one(pending, output):
    fut, tail = pending.pop(0)
    if fut is not None:
        output.write(fut.result())
    if tail:
        output.write(tail)


def trace_save(trace: SelectionTrace, sink: BinaryIO) -> None:
    """Write the binary trace format (little-endian, CRC32 of the indices)."""
    sink.write(_TRACE_HEADER.pack(TRACE_MAGIC, TRACE_VERSION,
                                  trace.chunk_bits, trace.indices.size))
    payload = trace.indices.astype("<u4").tobytes()
    sink.write(payload)
    sink.write(struct.pack("<I", zlib.crc32(payload)))


def trace_load(source: BinaryIO) -> SelectionTrace:
    head = _read_exact(source, _TRACE_HEADER.size, "trace header")
    magic, version, chunk_bits, count = _TRACE_HEADER.unpack(head)
    if magic != TRACE_MAGIC:
        raise FormatError(f"bad magic {magic!r}: not a trace file")
    if version != TRACE_VERSION:
        raise FormatError(f"unsupported trace format version {version}")
    payload = _read_exact(source, count * 4, "trace indices")
    (crc,) = struct.unpack("<I", _read_exact(source, 4, "trace CRC"))
    if zlib.crc32(payload) != crc:
        raise FormatError("trace CRC mismatch")
    return SelectionTrace(chunk_bits=chunk_bits,
                          indices=np.frombuffer(payload, dtype="<u4"))
