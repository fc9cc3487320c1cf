# -*- coding: utf-8 -*-
"""
Truncated multivariate power series over a graded-lex multi-index set.

A series in d variables truncated at total degree N is stored as a dense
coefficient vector indexed by ``MultiIndexSet``. The set is ordered by total
degree and, inside one degree, by descending lexicographic order, so the
unit vectors e_1, ..., e_d follow the constant term in that order.
"""

import logging
from functools import cached_property, lru_cache
from typing import Iterator, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_multi_indices(d: int, N: int) -> list[MultiIndex]:
    """All multi-indices of length d with total degree <= N, graded-lex."""
    if d < 1 or N < 0:
        raise ValueError(f"need d >= 1 and N >= 0, got d={d}, N={N}")
    out: list[MultiIndex] = []
    for degree in range(N + 1):
        out.extend(_compositions(degree, d))
    return out


class MultiIndexSet:
    """Graded-lex multi-index set with the tables needed for series algebra."""

    def __init__(self, d: int, N: int):
        self.d = int(d)
        self.N = int(N)
        self.indices = np.array(enumerate_multi_indices(self.d, self.N), dtype=np.int64)
        self.indices.setflags(write=False)
        self.degrees = self.indices.sum(axis=1)
        self.degrees.setflags(write=False)
        self._lookup = {tuple(int(v) for v in row): i for i, row in enumerate(self.indices)}
        # count of indices with degree <= g, for g = 0..N
        self._prefix = np.searchsorted(self.degrees, np.arange(self.N + 1), side="right")

    def __len__(self) -> int:
        return len(self.indices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MultiIndexSet) and (self.d, self.N) == (other.d, other.N)

    def __hash__(self) -> int:
        return hash((self.d, self.N))

    def __repr__(self) -> str:
        return f"MultiIndexSet(d={self.d}, N={self.N}, size={len(self)})"

    def position(self, n: MultiIndex) -> int:
        """Index of multi-index n in the graded-lex order."""
        key = tuple(int(v) for v in n)
        if len(key) != self.d:
            raise ValueError(f"multi-index {key} has length {len(key)}, expected {self.d}")
        try:
            return self._lookup[key]
        except KeyError:
            raise ValueError(f"multi-index {key} has degree above N={self.N}") from None

    def unit(self, k: int) -> int:
        """Position of the unit multi-index e_k (k is 0-based)."""
        n = [0] * self.d
        n[k] = 1
        return self.position(tuple(n))

    def _keys(self, rows: np.ndarray) -> np.ndarray:
        radix = (self.N + 1) ** np.arange(self.d, dtype=np.int64)
        return rows @ radix

    @cached_property
    def product_table(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index triples (i, j, k) with indices[i] + indices[j] = indices[k], |k| <= N."""
        keys = self._keys(self.indices)
        order = np.argsort(keys)
        sorted_keys = keys[order]
        rows_i, rows_j, rows_k = [], [], []
        for i in range(len(self)):
            room = self.N - int(self.degrees[i])
            js = np.arange(self._prefix[room])
            summed = self._keys(self.indices[i] + self.indices[js])
            ks = order[np.searchsorted(sorted_keys, summed)]
            rows_i.append(np.full(js.size, i, dtype=np.int64))
            rows_j.append(js)
            rows_k.append(ks)
        table = (np.concatenate(rows_i), np.concatenate(rows_j), np.concatenate(rows_k))
        logger.debug("built product table for %r with %d terms", self, table[0].size)
        return table

    @cached_property
    def shift_table(self) -> np.ndarray:
        """shift_table[k, i] = position of indices[i] + e_k, or -1 above degree N."""
        table = np.full((self.d, len(self)), -1, dtype=np.int64)
        for i, row in enumerate(self.indices):
            if self.degrees[i] == self.N:
                continue
            for k in range(self.d):
                bumped = list(int(v) for v in row)
                bumped[k] += 1
                table[k, i] = self._lookup[tuple(bumped)]
        return table

    def degree_mass(self, coeffs: np.ndarray) -> np.ndarray:
        """Sum of |coefficients| per total degree."""
        return np.bincount(self.degrees, weights=np.abs(coeffs), minlength=self.N + 1)

    def multiply(self, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, float]:
        """Truncated product and the l1 bound of the dropped terms."""
        I, J, K = self.product_table
        out = np.bincount(K, weights=a[I] * b[J], minlength=len(self))
        mass_a = self.degree_mass(a)
        mass_b = self.degree_mass(b)
        outer = np.add.outer(np.arange(self.N + 1), np.arange(self.N + 1))
        loss = float(np.sum(np.outer(mass_a, mass_b)[outer > self.N]))
        return out, loss

    def shift(self, a: np.ndarray, k: int) -> Tuple[np.ndarray, float]:
        """Multiply by the k-th variable (0-based), dropping degree N+1."""
        target = self.shift_table[k]
        keep = target >= 0
        out = np.zeros_like(a)
        out[target[keep]] = a[keep]
        return out, float(np.sum(np.abs(a[~keep])))

    def monomials(self, lam: np.ndarray) -> np.ndarray:
        """Values of every monomial lam^n in index order."""
        lam = np.asarray(lam)
        if lam.shape != (self.d,):
            raise ValueError(f"expected {self.d} variable values, got shape {lam.shape}")
        return np.prod(lam[None, :] ** self.indices, axis=1)

    def one(self) -> np.ndarray:
        out = np.zeros(len(self))
        out[0] = 1.0
        return out

    def reciprocal(self, a: np.ndarray) -> Tuple[np.ndarray, float]:
        """Truncated reciprocal 1/a; a[0] must be nonzero."""
        a0 = a[0]
        if a0 == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        u = a / a0
        u[0] = 0.0
        one = self.one()
        result = one.copy()
        loss = 0.0
        # Horner form of sum_{m<=N} (-u)^m
        for _ in range(self.N):
            prod, dropped = self.multiply(u, result)
            result = one - prod
            loss += dropped
        return result / a0, loss / abs(a0)

    def exp(self, a: np.ndarray) -> Tuple[np.ndarray, float]:
        """Truncated exponential of a series."""
        scale = np.exp(a[0])
        u = a.copy()
        u[0] = 0.0
        one = self.one()
        result = one.copy()
        loss = 0.0
        for m in range(self.N, 0, -1):
            prod, dropped = self.multiply(u, result)
            result = one + prod / m
            loss += dropped / m
        return scale * result, abs(scale) * loss

    def power(self, a: np.ndarray, k: int) -> Tuple[np.ndarray, float]:
        """k-th power (k >= 0) by repeated squaring."""
        if k < 0:
            raise ValueError("negative powers go through reciprocal()")
        result = self.one()
        base = a.copy()
        loss = 0.0
        while k:
            if k & 1:
                result, dropped = self.multiply(result, base)
                loss += dropped
            k >>= 1
            if k:
                base, dropped = self.multiply(base, base)
                loss += dropped
        return result, loss


@lru_cache(maxsize=32)
def multi_index_set(d: int, N: int) -> MultiIndexSet:
    """Shared, cached index set for (d, N)."""
    return MultiIndexSet(d, N)
