# -*- coding: utf-8 -*-
"""
Univariate truncated power series helpers (coefficient arrays, index = power).
"""

import numpy as np


def truncate(a: np.ndarray, N: int) -> np.ndarray:
    """Pad or cut a coefficient array to length N + 1."""
    out = np.zeros(N + 1, dtype=np.result_type(a, float))
    m = min(len(a), N + 1)
    out[:m] = a[:m]
    return out


def mul(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    return truncate(np.convolve(a, b), N)


def powers(alpha: np.ndarray, N: int) -> list[np.ndarray]:
    """[alpha^0, alpha^1, ..., alpha^N], each truncated at degree N."""
    alpha = truncate(np.asarray(alpha, dtype=float), N)
    out = [truncate(np.array([1.0]), N)]
    for _ in range(N):
        out.append(mul(out[-1], alpha, N))
    return out


def compose(outer: np.ndarray, inner: np.ndarray, N: int) -> np.ndarray:
    """Coefficients of outer(inner(x)) up to degree N; inner[0] must vanish."""
    inner = truncate(np.asarray(inner, dtype=float), N)
    if inner[0] != 0:
        raise ValueError("inner series must have zero constant term")
    result = np.zeros(N + 1)
    for coeff, power in zip(truncate(np.asarray(outer, dtype=float), N), powers(inner, N)):
        result += coeff * power
    return result


def exp(a: np.ndarray, N: int) -> np.ndarray:
    """exp of a truncated series."""
    a = truncate(np.asarray(a, dtype=float), N)
    u = a.copy()
    u[0] = 0.0
    one = truncate(np.array([1.0]), N)
    result = one.copy()
    for m in range(N, 0, -1):
        result = one + mul(u, result, N) / m
    return np.exp(a[0]) * result
