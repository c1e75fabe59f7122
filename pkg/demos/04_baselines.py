"""The two baseline whiteners kept for comparison: XOR combining and the
Von Neumann extractor.

XOR combining preserves length but needs a second independent stream;
Von Neumann debiases perfectly on independent bits but discards most of
the input. The permutation whitener gives up perfect debiasing to keep
every byte.

    python3 demos/04_baselines.py
"""

import io

import numpy as np

from permwhite import CounterSource, von_neumann, xor_combine

MIB = 1 << 20


def biased_bits(key, size):
    """Bytes whose bits are 1 with probability ~0.75."""
    a = np.frombuffer(CounterSource(key).read_bytes(size), dtype=np.uint8)
    b = np.frombuffer(CounterSource(key + "-b").read_bytes(size), dtype=np.uint8)
    return (a | b).tobytes()  # OR of two uniform streams


def ones_fraction(data):
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8)).mean()


def main():
    stream1 = biased_bits("demo-vn-1", MIB)
    stream2 = biased_bits("demo-vn-2", MIB)
    print(f"input one-bit fraction: {ones_fraction(stream1):.4f} "
          f"(0.5 would be unbiased)")

    print("\n== XOR combining ==")
    out = io.BytesIO()
    written = xor_combine(io.BytesIO(stream1), io.BytesIO(stream2), out)
    combined = out.getvalue()
    print(f"wrote {written} bytes (length preserved)")
    print(f"one-bit fraction after XOR: {ones_fraction(combined):.4f}")

    print("\n== Von Neumann extraction ==")
    out = io.BytesIO()
    bits = von_neumann(io.BytesIO(stream1), out)
    extracted = out.getvalue()
    kept = bits / (len(stream1) * 8)
    print(f"kept {bits} of {len(stream1) * 8} input bits ({kept:.1%})")
    # the padded tail byte would skew a naive fraction; count real bits
    real = np.unpackbits(np.frombuffer(extracted, dtype=np.uint8))[:bits]
    print(f"one-bit fraction after extraction: {real.mean():.4f}")


if __name__ == "__main__":
    main()
