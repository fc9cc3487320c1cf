# -*- coding: utf-8 -*-
"""
gammanoise utilities organized by concern.
"""

from .series import *
from .quadrature import *
from .rng import *
from .export import *

__all__ = [
    # Series algebra
    "MultiIndex",
    "MultiIndexSet",
    "enumerate_multi_indices",
    "multi_index_set",
    "univariate",

    # Quadrature
    "golub_welsch",
    "gauss_laguerre",
    "gauss_legendre",

    # Random streams
    "BLOCK_SIZE",
    "block_generator",
    "iter_blocks",
    "stream_tag",

    # Writers
    "to_json_text",
    "write_csv",
    "write_json",
]
