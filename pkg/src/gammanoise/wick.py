# -*- coding: utf-8 -*-
"""
Truncated chaos algebra: S-transform, Wick product, powers, inverse and
exponential, all defined by multiplication of S-transforms.

Elements store S-coefficients s_n = nu_n * c_n (c_n are the coordinates in
the orthogonal Laguerre basis J_n). In S-coordinates the Wick product is the
product of multivariate polynomials in the step values of theta, truncated
at total degree N.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .chaos import basis_eval, norm_vector
from .core_model import Partition, StepFunction
from .errors import DomainError, PartitionMismatchError, SingularElementError
from .utils.export import write_csv
from .utils.series import MultiIndex, MultiIndexSet, multi_index_set

logger = logging.getLogger(__name__)

__all__ = [
    "ChaosElement",
    "s_transform",
    "wick_mul",
    "wick_inv",
    "wick_exp",
    "wick_pow",
    "expectation",
    "variance",
    "random_element",
]


@dataclass(frozen=True, eq=False)
class ChaosElement:
    """Truncated expansion sum_n c_n J_n over a partition, held in S-coordinates."""
    partition: Partition
    N: int
    s_coeffs: np.ndarray
    truncation_loss: float = 0.0
    _index_set: MultiIndexSet = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index_set = multi_index_set(self.partition.n_cells, int(self.N))
        s = np.array(self.s_coeffs, dtype=float)
        if s.shape != (len(index_set),):
            raise DomainError(
                f"expected {len(index_set)} coefficients for d={index_set.d}, N={index_set.N}, "
                f"got shape {s.shape}"
            )
        if not np.all(np.isfinite(s)):
            raise DomainError("chaos coefficients must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "s_coeffs", s)
        object.__setattr__(self, "_index_set", index_set)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_s_coeffs(cls, partition: Partition, N: int, s_coeffs: np.ndarray,
                      truncation_loss: float = 0.0) -> "ChaosElement":
        return cls(partition, N, s_coeffs, truncation_loss)

    @classmethod
    def from_coeffs(cls, partition: Partition, N: int, coeffs: np.ndarray) -> "ChaosElement":
        """From J-basis coordinates c_n."""
        return cls(partition, N, np.asarray(coeffs, dtype=float) * norm_vector(partition, N))

    @classmethod
    def zero(cls, partition: Partition, N: int) -> "ChaosElement":
        return cls(partition, N, np.zeros(len(multi_index_set(partition.n_cells, N))))

    @classmethod
    def constant(cls, partition: Partition, N: int, c: float) -> "ChaosElement":
        s = np.zeros(len(multi_index_set(partition.n_cells, N)))
        s[0] = c
        return cls(partition, N, s)

    @classmethod
    def unit(cls, partition: Partition, N: int, n: MultiIndex, c: float = 1.0) -> "ChaosElement":
        """c * J_n."""
        index_set = multi_index_set(partition.n_cells, N)
        coeffs = np.zeros(len(index_set))
        coeffs[index_set.position(n)] = c
        return cls.from_coeffs(partition, N, coeffs)

    # -- views ----------------------------------------------------------------

    @property
    def index_set(self) -> MultiIndexSet:
        return self._index_set

    @property
    def nu(self) -> np.ndarray:
        return norm_vector(self.partition, self.N)

    @property
    def coeffs(self) -> np.ndarray:
        """J-basis coordinates c_n = s_n / nu_n."""
        return self.s_coeffs / self.nu

    def coeff(self, n: MultiIndex) -> float:
        return float(self.coeffs[self.index_set.position(n)])

    def s_coeff(self, n: MultiIndex) -> float:
        return float(self.s_coeffs[self.index_set.position(n)])

    def degree(self) -> int:
        """Highest total degree carrying a nonzero coefficient."""
        nonzero = np.nonzero(self.s_coeffs)[0]
        return int(self.index_set.degrees[nonzero[-1]]) if nonzero.size else 0

    def is_deterministic(self) -> bool:
        return not np.any(self.s_coeffs[1:])

    # -- linear structure -----------------------------------------------------

    def _check_compatible(self, other: "ChaosElement") -> None:
        if not isinstance(other, ChaosElement):
            raise TypeError(f"expected ChaosElement, got {type(other).__name__}")
        if other.partition != self.partition:
            raise PartitionMismatchError("chaos elements live on different partitions")
        if other.N != self.N:
            raise PartitionMismatchError(f"truncation mismatch: N={self.N} vs N={other.N}")

    def _coerce(self, other: Union["ChaosElement", float]) -> "ChaosElement":
        if isinstance(other, (int, float, np.floating)):
            return ChaosElement.constant(self.partition, self.N, float(other))
        self._check_compatible(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return ChaosElement(self.partition, self.N, self.s_coeffs + other.s_coeffs,
                            self.truncation_loss + other.truncation_loss)

    __radd__ = __add__

    def __neg__(self):
        return ChaosElement(self.partition, self.N, -self.s_coeffs, self.truncation_loss)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, scalar: float):
        if isinstance(scalar, ChaosElement):
            raise TypeError("use wick_mul for products of chaos elements")
        return ChaosElement(self.partition, self.N, float(scalar) * self.s_coeffs,
                            abs(float(scalar)) * self.truncation_loss)

    __rmul__ = __mul__

    def allclose(self, other: "ChaosElement", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        self._check_compatible(other)
        return bool(np.allclose(self.s_coeffs, other.s_coeffs, atol=atol, rtol=rtol))

    def evaluate(self, increments: np.ndarray) -> np.ndarray:
        """Pathwise value sum_n c_n J_n(x) on (n_paths, d) cell increments."""
        increments = np.asarray(increments, dtype=float)
        values = np.zeros(increments.shape[:-1])
        for idx, c in zip(self.index_set.indices, self.coeffs):
            if c:
                values = values + c * basis_eval(tuple(idx), increments, self.partition)
        return values

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        return {
            "partition": self.partition.to_dict(),
            "N": self.N,
            "coeffs": [[[int(v) for v in idx], float(c)]
                       for idx, c in zip(self.index_set.indices, self.coeffs)],
            "truncation_loss": self.truncation_loss,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ChaosElement":
        partition = Partition(tuple(payload["partition"]["edges"]))
        N = int(payload["N"])
        index_set = multi_index_set(partition.n_cells, N)
        coeffs = np.zeros(len(index_set))
        for idx, c in payload["coeffs"]:
            coeffs[index_set.position(tuple(idx))] = c
        element = cls.from_coeffs(partition, N, coeffs)
        return cls(partition, N, element.s_coeffs, float(payload.get("truncation_loss", 0.0)))

    @classmethod
    def from_json(cls, text: str) -> "ChaosElement":
        return cls.from_dict(json.loads(text))

    def to_csv(self, target: Union[str, Path]) -> Path:
        """Rows multiindex,c,nu,s_coeff in graded-lex order."""
        rows = ((tuple(int(v) for v in idx), float(c), float(nu), float(s))
                for idx, c, nu, s in zip(self.index_set.indices, self.coeffs, self.nu, self.s_coeffs))
        return write_csv(target, ["multiindex", "c", "nu", "s_coeff"], rows)


# =============================================================================
# OPERATIONS
# =============================================================================

def s_transform(phi: ChaosElement, theta: StepFunction):
    """sum_n c_n nu_n prod_k lam_k^{n_k}."""
    if theta.partition != phi.partition:
        raise PartitionMismatchError("theta and the chaos element use different partitions")
    value = np.dot(phi.s_coeffs, phi.index_set.monomials(theta.as_array()))
    return float(value) if theta.is_real else complex(value)


def wick_mul(phi: ChaosElement, psi: ChaosElement) -> ChaosElement:
    """S(phi <> psi) = S(phi) S(psi), truncated at degree N."""
    phi._check_compatible(psi)
    out, dropped = phi.index_set.multiply(phi.s_coeffs, psi.s_coeffs)
    return ChaosElement(phi.partition, phi.N, out,
                        phi.truncation_loss + psi.truncation_loss + dropped)


def wick_inv(phi: ChaosElement, time: Optional[float] = None) -> ChaosElement:
    """Truncated Wick inverse; needs a nonzero constant term."""
    if phi.s_coeffs[0] == 0.0:
        raise SingularElementError("cannot Wick-invert an element with c_0 = 0", time=time)
    out, dropped = phi.index_set.reciprocal(phi.s_coeffs)
    return ChaosElement(phi.partition, phi.N, out, phi.truncation_loss + dropped)


def wick_exp(phi: ChaosElement) -> ChaosElement:
    """Wick exponential: S-coefficients of exp(S(phi)), truncated."""
    out, dropped = phi.index_set.exp(phi.s_coeffs)
    return ChaosElement(phi.partition, phi.N, out, phi.truncation_loss + dropped)


def wick_pow(phi: ChaosElement, k: int) -> ChaosElement:
    """k-fold Wick power; negative k uses the Wick inverse."""
    base = wick_inv(phi) if k < 0 else phi
    out, dropped = base.index_set.power(base.s_coeffs, abs(int(k)))
    return ChaosElement(phi.partition, phi.N, out, base.truncation_loss + dropped)


def expectation(phi: ChaosElement) -> float:
    return float(phi.s_coeffs[0])


def variance(phi: ChaosElement) -> float:
    """sum_{n != 0} c_n^2 nu_n = sum_{n != 0} s_n^2 / nu_n."""
    return float(np.sum(phi.s_coeffs[1:] ** 2 / phi.nu[1:]))


def random_element(partition: Partition, N: int, rng: np.random.Generator,
                   c0_min: float = 0.0, decay: float = 0.5) -> ChaosElement:
    """
    Random element for algebra checks: S-coefficients uniform in [-1, 1]
    scaled by decay^|n|, constant term with |c_0| >= c0_min.
    """
    index_set = multi_index_set(partition.n_cells, N)
    s = rng.uniform(-1.0, 1.0, len(index_set)) * decay ** index_set.degrees
    if c0_min > 0:
        s[0] = rng.choice([-1.0, 1.0]) * rng.uniform(c0_min, 1.0)
    return ChaosElement(partition, N, s)
