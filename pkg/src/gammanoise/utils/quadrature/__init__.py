# -*- coding: utf-8 -*-
"""
Quadrature rules for norm checks and integral-equation residuals.
"""

from .gauss import (
    golub_welsch,
    gauss_laguerre,
    gauss_legendre,
)

__all__ = [
    "golub_welsch",
    "gauss_laguerre",
    "gauss_legendre",
]
