# -*- coding: utf-8 -*-
"""
Seeded, block-keyed random streams.
"""

from .streams import (
    BLOCK_SIZE,
    block_generator,
    iter_blocks,
    stream_tag,
)

__all__ = [
    "BLOCK_SIZE",
    "block_generator",
    "iter_blocks",
    "stream_tag",
]
