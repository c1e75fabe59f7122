"""The two statistics batteries, and the verdict machinery built on them.

Five byte-mode statistics (entropy, chi-square, mean, Monte Carlo pi,
serial correlation) plus a four-test bit-mode battery (monobit, block
frequency, runs, cumulative sums both directions).

    python3 demos/03_statistics.py
"""

import io

import numpy as np

from permwhite import (
    CounterSource,
    compare_reports,
    ent_analyze,
    nist_lite,
    render_comparison,
    render_ent_text,
    render_nist_text,
)

MIB = 1 << 20


def main():
    uniform = CounterSource("demo-stats").read_bytes(2 * MIB)
    arr = np.frombuffer(uniform, dtype=np.uint8).copy()
    arr[::8] &= 0x7F  # clear the top bit of every 8th byte
    biased = arr.tobytes()

    print(render_ent_text(ent_analyze(io.BytesIO(biased)),
                          title="biased stream"))
    print()
    print(render_nist_text(nist_lite(io.BytesIO(biased))))

    print("\nThe same battery on the untouched uniform stream:\n")
    print(render_nist_text(nist_lite(io.BytesIO(uniform))))

    before = ent_analyze(io.BytesIO(biased))
    after = ent_analyze(io.BytesIO(uniform))
    verdicts = compare_reports(before, after)
    print("\nPer-parameter verdicts, biased -> uniform:\n")
    print(render_comparison(before, after, verdicts))


if __name__ == "__main__":
    main()
