# -*- coding: utf-8 -*-
"""
Laguerre and Appell polynomial systems of the gamma noise, the alpha
composition that turns one into the other, and the multi-index orthogonal
chaos basis over a partition.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import special

from .core_model import Partition, StepFunction, alpha_mu_series
from .errors import DomainError, PartitionMismatchError
from .utils.export import write_csv
from .utils.quadrature import gauss_laguerre
from .utils.series import MultiIndex, enumerate_multi_indices, multi_index_set, univariate

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_DEGREE",
    "DEFAULT_CELLS",
    "PolySeries",
    "laguerre_eval",
    "laguerre_family",
    "laguerre_coeffs",
    "generating_function",
    "generating_function_series",
    "generating_function_check",
    "appell_coeffs",
    "compose_with_alpha",
    "chaos_norm",
    "norm_vector",
    "basis_eval",
    "expand_linear",
    "orthogonality_table",
    "enumerate_multi_indices",
    "family_to_csv",
    "norm_table_to_csv",
]

DEFAULT_DEGREE = 8
DEFAULT_CELLS = 4


@dataclass(frozen=True)
class PolySeries:
    """Univariate polynomial in the monomial basis (coeffs[j] multiplies s^j)."""
    coeffs: np.ndarray
    shape: Optional[float] = None

    @property
    def degree(self) -> int:
        nonzero = np.nonzero(self.coeffs)[0]
        return int(nonzero[-1]) if nonzero.size else 0

    def __call__(self, s):
        return npoly.polyval(s, self.coeffs)

    def padded(self, length: int) -> np.ndarray:
        return univariate.truncate(self.coeffs, length - 1)


def _check_shape(t: float) -> None:
    if not t > 0:
        raise DomainError(f"Laguerre shape t must be positive, got {t!r}")


# =============================================================================
# UNIVARIATE SYSTEMS
# =============================================================================

def laguerre_family(n_max: int, t: float, s) -> np.ndarray:
    """L_0..L_{n_max} with parameter t - 1 at s; shape (n_max + 1,) + shape(s)."""
    _check_shape(t)
    if n_max < 0:
        raise DomainError(f"degree must be nonnegative, got {n_max}")
    s = np.asarray(s, dtype=float)
    out = np.empty((n_max + 1,) + s.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = t - s
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + t - s) * out[n] - (n + t - 1) * out[n - 1]) / (n + 1)
    return out


def laguerre_eval(n: int, t: float, s) -> Union[float, np.ndarray]:
    """L_n^{(t-1)}(s) by the three-term recurrence."""
    value = laguerre_family(n, t, s)[n]
    return float(value) if value.ndim == 0 else value


def laguerre_coeffs(n: int, t: float) -> PolySeries:
    """Monomial coefficients of L_n^{(t-1)}; for cross-validation only."""
    _check_shape(t)
    j = np.arange(n + 1)
    coeffs = (-1.0) ** j * special.binom(n + t - 1.0, n - j) / special.factorial(j)
    return PolySeries(coeffs=coeffs, shape=t)


def generating_function(t: float, s: float, lam: complex) -> complex:
    """(1 - lam)^(-t) exp{s lam / (lam - 1)}."""
    return (1.0 - lam) ** (-t) * np.exp(s * lam / (lam - 1.0))


def generating_function_series(t: float, s: float, N: int) -> np.ndarray:
    """Taylor coefficients in lam of the generating function, by series algebra."""
    _check_shape(t)
    n = np.arange(N + 1)
    binomial = special.binom(n + t - 1.0, n)
    exponential = univariate.exp(s * alpha_mu_series(N), N)
    return univariate.mul(binomial, exponential, N)


def generating_function_check(t: float, s: float, lam: float, N: int) -> float:
    """|sum_{n<=N} L_n(s) lam^n - closed form|; decays geometrically in N."""
    _check_shape(t)
    if abs(lam) >= 1.0:
        raise DomainError(f"generating function series needs |lambda| < 1, got {lam!r}")
    if lam == 0:
        return abs(laguerre_eval(0, t, s) - 1.0)
    partial = np.polynomial.polynomial.polyval(lam, laguerre_family(N, t, s))
    return float(abs(partial - generating_function(t, s, lam)))


def appell_coeffs(n: int, t: float) -> PolySeries:
    """
    Appell polynomial P_n from e^{s lam}(1 - lam)^t = sum_n P_n(s) lam^n / n!:
    P_n(s)/n! = sum_{j<=n} (-1)^j C(t, j) s^(n-j) / (n-j)!.
    """
    _check_shape(t)
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    coeffs = np.zeros(n + 1)
    for j in range(n + 1):
        coeffs[n - j] = (-1.0) ** j * special.binom(t, j) / math.factorial(n - j)
    return PolySeries(coeffs=coeffs * math.factorial(n), shape=t)


def compose_with_alpha(appell_series: Sequence[PolySeries], N: int,
                       alpha: Optional[np.ndarray] = None) -> List[PolySeries]:
    """
    Substitute lam -> alpha(lam) in sum_n P_n(s) lam^n / n! and regroup by
    powers of lam. With alpha_mu this yields the Laguerre family.
    """
    if len(appell_series) < N + 1:
        raise DomainError(f"need Appell polynomials up to degree {N}, got {len(appell_series)}")
    alpha = alpha_mu_series(N) if alpha is None else univariate.truncate(np.asarray(alpha, float), N)
    if alpha[0] != 0:
        raise DomainError("alpha must have zero constant term for series composition")
    alpha_powers = univariate.powers(alpha, N)
    scaled = [p.padded(N + 1) / math.factorial(n) for n, p in enumerate(appell_series[: N + 1])]
    shape = appell_series[0].shape
    out = []
    for m in range(N + 1):
        coeffs = np.zeros(N + 1)
        for n in range(m + 1):
            coeffs += alpha_powers[n][m] * scaled[n]
        out.append(PolySeries(coeffs=coeffs[: m + 1], shape=shape))
    return out


# =============================================================================
# MULTI-INDEX CHAOS
# =============================================================================

def chaos_norm(n: MultiIndex, partition: Partition) -> float:
    """nu_n = prod_k Gamma(n_k + t_k) / (n_k! Gamma(t_k))."""
    n = tuple(int(v) for v in n)
    if len(n) != partition.n_cells or any(v < 0 for v in n):
        raise DomainError(f"multi-index {n} invalid for {partition.n_cells} cells")
    t = partition.lengths
    return float(np.prod(special.poch(t, n) / special.factorial(n)))


def norm_vector(partition: Partition, N: int) -> np.ndarray:
    """nu_n for every multi-index of the graded-lex set (d = cells, degree <= N)."""
    index_set = multi_index_set(partition.n_cells, N)
    t = partition.lengths[None, :]
    A = index_set.indices
    return np.prod(special.poch(t, A) / special.factorial(A), axis=1)


def _increments_of(path, partition: Optional[Partition] = None) -> np.ndarray:
    if isinstance(path, np.ndarray):
        if partition is None:
            raise DomainError("raw increment arrays need an explicit partition")
        return path
    increments = getattr(path, "increments", None)
    if increments is None:
        raise DomainError("basis evaluation needs increment-form paths")
    if partition is not None and path.partition != partition:
        raise PartitionMismatchError("path and basis use different partitions")
    return np.asarray(increments)


def basis_eval(n: MultiIndex, path, partition: Optional[Partition] = None):
    """
    J_n = prod_k L_{n_k}^{(t_k - 1)}(G_k) for a GammaPath (float) or a
    PathBatch / (n, d) increment array (one value per path).
    """
    G = _increments_of(path, partition)
    part = partition or path.partition
    n = tuple(int(v) for v in n)
    if len(n) != part.n_cells:
        raise DomainError(f"multi-index {n} invalid for {part.n_cells} cells")
    value = np.ones(G.shape[:-1])
    for k, (nk, tk) in enumerate(zip(n, part.lengths)):
        if nk:
            value = value * laguerre_eval(nk, tk, G[..., k])
    return float(value) if value.ndim == 0 else value


def expand_linear(f: StepFunction, N: int = DEFAULT_DEGREE):
    """Chaos expansion of <x, f> = sum_k t_k lam_k J_0 - lam_k J_{e_k}."""
    from .wick import ChaosElement

    if not f.is_real:
        raise DomainError("expand_linear needs a real step function")
    if N < 1:
        raise DomainError("a linear functional needs truncation degree >= 1")
    index_set = multi_index_set(f.partition.n_cells, N)
    lam = f.as_array()
    coeffs = np.zeros(len(index_set))
    coeffs[0] = float(np.dot(f.partition.lengths, lam))
    for k in range(f.partition.n_cells):
        coeffs[index_set.unit(k)] = -lam[k]
    return ChaosElement.from_coeffs(f.partition, N, coeffs)


# =============================================================================
# QUADRATURE CHECKS
# =============================================================================

def orthogonality_table(t: float, n_max: int, n_nodes: Optional[int] = None) -> np.ndarray:
    """Gram matrix E[L_n L_m] under Gamma(t) by generalized Gauss-Laguerre (2 n_max + 8 nodes)."""
    nodes, weights = gauss_laguerre(n_nodes or 2 * n_max + 8, float(t))
    values = laguerre_family(n_max, t, nodes)
    return (values * weights[None, :]) @ values.T


# =============================================================================
# EXPORT
# =============================================================================

def family_to_csv(family: Sequence[PolySeries], target: Union[str, Path]) -> Path:
    """CSV rows n,coeff_0,...,coeff_n (ragged)."""
    width = len(family)
    header = ["n"] + [f"coeff_{j}" for j in range(width)]
    rows = ([n] + [float(c) for c in p.padded(n + 1)] for n, p in enumerate(family))
    return write_csv(target, header, rows)


def norm_table_to_csv(partition: Partition, N: int, target: Union[str, Path]) -> Path:
    index_set = multi_index_set(partition.n_cells, N)
    nu = norm_vector(partition, N)
    rows = ((tuple(int(v) for v in idx), float(v)) for idx, v in zip(index_set.indices, nu))
    return write_csv(target, ["multiindex", "nu"], rows)
