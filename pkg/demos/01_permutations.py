"""A guided tour of bit-position permutations, the toolkit's core object.

Run from the repository root after `pip install -e .`:

    python3 demos/01_permutations.py
"""

import numpy as np

from permwhite import (
    CounterSource,
    IndexPermutation,
    generate_fullrange_shuffle,
    generate_pool,
    generate_unbiased_shuffle,
)


def show(label, perm):
    print(f"{label:<24} map = {perm.map.tolist()}")


def dense(perm):
    """The same permutation as an explicit 0/1 matrix (row i has its 1
    in column map[i]), for readers who prefer linear algebra."""
    m = np.zeros((perm.size, perm.size), dtype=np.uint8)
    m[np.arange(perm.size), perm.map] = 1
    return m


def main():
    print("== A 4-bit permutation by hand ==")
    perm = IndexPermutation([0, 2, 3, 1])
    show("hand-built", perm)
    chunk = np.array([0, 0, 0, 1], dtype=np.uint8)
    print(f"apply to 0001       -> {''.join(map(str, perm.apply(chunk)))}")
    print("as a dense matrix:")
    print(dense(perm))
    print(f"matrix @ chunk      -> {dense(perm) @ chunk}  (same answer)")

    print("\n== Inversion and composition ==")
    inv = perm.invert()
    show("inverse", inv)
    show("perm o inverse", perm.compose(inv))
    print(f"is_identity          {perm.compose(inv).is_identity()}")

    print("\n== Generating permutations from entropy ==")
    # a deterministic source keeps this demo reproducible; pass OsEntropy()
    # for real randomness
    rng = CounterSource("demo-shuffles")
    show("fullrange draw", generate_fullrange_shuffle(3, rng))
    show("unbiased draw", generate_unbiased_shuffle(3, rng))
    print("fullrange is the flagship three-step shuffle (measurably")
    print("non-uniform over the permutation group); unbiased is the")
    print("textbook Fisher-Yates shuffle (exactly uniform).")

    print("\n== A pool: the unit the whitener consumes ==")
    pool = generate_pool(n_qubits=3, count=4, rng=rng, generator_tag="demo")
    print(f"pool of {pool.count} permutations over {pool.size}-bit chunks")
    for i, p in enumerate(pool.permutations):
        show(f"  member {i}", p)


if __name__ == "__main__":
    main()
