# -*- coding: utf-8 -*-
"""
Truncated power series algebra used by the chaos and Wick layers.
"""

from .multi_index import (
    MultiIndex,
    MultiIndexSet,
    enumerate_multi_indices,
    multi_index_set,
)
from . import univariate

__all__ = [
    "MultiIndex",
    "MultiIndexSet",
    "enumerate_multi_indices",
    "multi_index_set",
    "univariate",
]
