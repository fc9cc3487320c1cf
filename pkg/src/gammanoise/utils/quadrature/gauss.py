# -*- coding: utf-8 -*-
"""
Gaussian quadrature rules.

Nodes come from the Golub-Welsch eigenvalue problem on the Jacobi matrix.
Weights are the Christoffel numbers 1 / sum_k p_k(x_i)^2 evaluated with the
orthonormal three-term recurrence, which keeps the tiny weights at the far
nodes accurate in the relative sense (eigenvector components do not).
"""

import logging
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import legendre
from scipy.linalg import eigh_tridiagonal

logger = logging.getLogger(__name__)


def golub_welsch(diag: np.ndarray, offdiag: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights of the Gauss rule for a probability measure.

    Args:
        diag: recurrence coefficients a_0..a_{n-1} (Jacobi matrix diagonal)
        offdiag: sqrt(b_1)..sqrt(b_{n-1}) (Jacobi matrix off-diagonal)
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    n = diag.size
    if offdiag.size != n - 1:
        raise ValueError(f"off-diagonal must have {n - 1} entries, got {offdiag.size}")
    nodes = eigh_tridiagonal(diag, offdiag, eigvals_only=True)

    p_prev = np.zeros(n)
    p_curr = np.ones(n)
    total = p_curr ** 2
    for k in range(n - 1):
        p_next = ((nodes - diag[k]) * p_curr - (offdiag[k - 1] if k > 0 else 0.0) * p_prev) / offdiag[k]
        p_prev, p_curr = p_curr, p_next
        total += p_curr ** 2
    weights = 1.0 / total
    return nodes, weights


@lru_cache(maxsize=64)
def gauss_laguerre(n: int, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    n-point Gauss rule for the gamma density s^(t-1) e^(-s) / Gamma(t).

    Exact for polynomials of degree <= 2n - 1.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if t <= 0:
        raise ValueError(f"shape must be positive, got {t}")
    k = np.arange(n, dtype=float)
    diag = 2.0 * k + t
    offdiag = np.sqrt(k[1:] * (k[1:] + t - 1.0))
    nodes, weights = golub_welsch(diag, offdiag)
    logger.debug("gauss_laguerre(n=%d, t=%g): weight sum %.16g", n, t, weights.sum())
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(n: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule mapped to [a, b] (weights sum to b - a)."""
    x, w = legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w
