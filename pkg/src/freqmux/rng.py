"""Shard-independent random streams.

Work is cut into fixed-size chunks and chunk ``c`` always draws from a
generator keyed on ``(seed, stream, c)``.  Shards are contiguous runs of
chunks, so changing the shard count never changes a single draw.
"""

from __future__ import annotations

import numpy as np

CHUNK = 8192


def chunk_generator(seed: int, chunk: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, chunk))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_sizes(n: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(n, chunk)
    return [chunk] * full + ([rest] if rest else [])


def shard_ranges(n_chunks: int, shards: int) -> list[range]:
    bounds = np.linspace(0, n_chunks, shards + 1).round().astype(int)
    return [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
