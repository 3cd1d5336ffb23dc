"""Smoke test for the Python bindings.

Build the extension first:
    cargo build --release -p polydither-py
    cp target/release/libpolydither_py.so python/polydither_py.so
Then run `python3 python/smoke.py [table.txt]`. Without a table a small
one (S=4) is built, which takes about a minute.
"""

import os
import random
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import polydither_py as pd  # noqa: E402


def main():
    if len(sys.argv) > 1:
        table = pd.Table.load(sys.argv[1])
    else:
        table = pd.Table.build(s=4, d0=(1, 4), sigma=1.0)
    n = table.levels
    print(f"S={table.s} levels={n} classes={table.classes} sha256={table.hash()[:16]}")

    g = 6 / 256
    counts = table.complete_tile_counts(g, 256, 256, (5, 9))
    want = pd.expected_black(n, g)
    assert counts and all(c == want for c in counts), "tone is not exact"
    print(f"level 6/256: {len(counts)} complete tiles, {want} black each")

    black = table.dither(bytes(64 * 32), 64, 32)
    assert set(black) == {1}, "black input must stay black"
    white = table.dither(bytes([255]) * (64 * 32), 64, 32)
    assert set(white) == {0}, "white input must stay white"

    rng = random.Random(1)
    patches = [table.dither_level(g, 256, 256, (rng.randrange(10**5), rng.randrange(10**5))) for _ in range(4)]
    ours = pd.low_frequency_ratio([list(p) for p in patches], 256, g)
    noise = [[int(rng.random() < g) for _ in range(256 * 256)] for _ in range(4)]
    white_noise = pd.low_frequency_ratio(noise, 256, g)
    print(f"low-frequency ratio: ours {ours:.3f}, white noise {white_noise:.3f}")
    assert ours < white_noise

    ranks = pd.void_and_cluster(16)
    assert sorted(ranks) == list(range(256))
    print("ok")


if __name__ == "__main__":
    main()
