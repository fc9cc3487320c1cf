# -*- coding: utf-8 -*-
"""
Keyed random streams for reproducible, parallel-safe simulation.

Paths are generated in fixed-size blocks. Block b of stream ``tag`` under
``seed`` draws from a Philox (counter-based) generator whose key is derived
from SeedSequence(seed, spawn_key=(tag, b)). Path i always lives in block
i // BLOCK_SIZE at the same offset, so its values depend only on
(seed, tag, i) and never on how many paths were requested or on which worker
produced the block.
"""

import zlib
from typing import Iterator, Tuple

import numpy as np

BLOCK_SIZE = 4096

_STREAM_TAGS = {}


def stream_tag(name: str) -> int:
    """Stable integer tag for a named stream."""
    if name not in _STREAM_TAGS:
        _STREAM_TAGS[name] = zlib.crc32(name.encode("utf-8"))
    return _STREAM_TAGS[name]


def block_generator(seed: int, stream: str, block: int) -> np.random.Generator:
    """Independent generator for one block of one named stream."""
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    sequence = np.random.SeedSequence(int(seed), spawn_key=(stream_tag(stream), int(block)))
    return np.random.Generator(np.random.Philox(sequence))


def iter_blocks(n_paths: int) -> Iterator[Tuple[int, int]]:
    """(block index, number of paths kept from that block)."""
    if n_paths < 0:
        raise ValueError("path count must be nonnegative")
    n_blocks = -(-n_paths // BLOCK_SIZE)
    for block in range(n_blocks):
        yield block, min(BLOCK_SIZE, n_paths - block * BLOCK_SIZE)
