# -*- coding: utf-8 -*-
"""
Partitions, step functions and the closed-form measure-level formulas of the
gamma noise: characteristic functional, gamma density, Levy triple quantities
and the alpha map that turns the Appell system into the Laguerre one.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from .errors import BranchError, DomainError

logger = logging.getLogger(__name__)

__all__ = [
    "Partition",
    "StepFunction",
    "LevyTriple",
    "LevyMeasureReport",
    "parse_step_spec",
    "log_cf",
    "cf",
    "gamma_function",
    "log_gamma",
    "gamma_density",
    "levy_density",
    "levy_tail_mass",
    "levy_small_jump_mean",
    "levy_large_jump_mean",
    "levy_khinchine_exponent",
    "levy_triple",
    "levy_measure_conditions",
    "alpha_mu_series",
    "poisson_alpha_series",
]

QUAD_EPSABS = 1e-12
# exp(-745) is the smallest positive double; e^{-u}/u beyond it is exactly zero
_LOG_UPPER = math.log(745.0)


# =============================================================================
# PARTITIONS AND STEP FUNCTIONS
# =============================================================================

@dataclass(frozen=True)
class Partition:
    """Contiguous half-open cells [u_k, u_{k+1}) covering [0, T]."""
    edges: tuple

    def __post_init__(self):
        edges = tuple(float(u) for u in self.edges)
        object.__setattr__(self, "edges", edges)
        if len(edges) < 2:
            raise DomainError("a partition needs at least one cell (two edges)")
        if edges[0] != 0.0:
            raise DomainError(f"partition must start at 0, got u_0={edges[0]!r}")
        if not all(math.isfinite(u) for u in edges):
            raise DomainError("partition edges must be finite")
        for k in range(len(edges) - 1):
            if not edges[k + 1] > edges[k]:
                raise DomainError(
                    f"cell {k} has non-positive length: [{edges[k]!r}, {edges[k + 1]!r})"
                )

    @classmethod
    def uniform(cls, horizon: float, cells: int) -> "Partition":
        if cells < 1:
            raise DomainError(f"need at least one cell, got {cells}")
        if not horizon > 0:
            raise DomainError(f"horizon must be positive, got {horizon}")
        return cls(tuple(np.linspace(0.0, horizon, cells + 1)))

    @property
    def n_cells(self) -> int:
        return len(self.edges) - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.edges))

    @property
    def horizon(self) -> float:
        return self.edges[-1]

    def refine(self, k: int) -> "Partition":
        """Split every cell into k equal cells."""
        if k < 1:
            raise DomainError(f"refinement factor must be >= 1, got {k}")
        edges = [0.0]
        for lo, hi in zip(self.edges[:-1], self.edges[1:]):
            edges.extend(np.linspace(lo, hi, k + 1)[1:].tolist())
        return Partition(tuple(edges))

    def cell_of(self, time: float) -> int:
        """Index of the cell containing time; the right end T belongs to the last cell."""
        if time < 0.0 or time > self.horizon:
            raise DomainError(f"time {time!r} outside [0, {self.horizon!r}]")
        k = int(np.searchsorted(self.edges, time, side="right")) - 1
        return min(k, self.n_cells - 1)

    def overlap(self, t: float) -> np.ndarray:
        """w_k(t) = |cell_k intersected with [0, t]| for every cell."""
        edges = np.asarray(self.edges)
        return np.clip(np.minimum(edges[1:], t) - edges[:-1], 0.0, None)

    def to_dict(self) -> Dict[str, Any]:
        return {"edges": list(self.edges)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class StepFunction:
    """A test function constant on each partition cell."""
    partition: Partition
    values: tuple

    def __post_init__(self):
        values = tuple(self.values)
        if len(values) != self.partition.n_cells:
            raise DomainError(
                f"{len(values)} values for a partition with {self.partition.n_cells} cells"
            )
        if all(complex(v).imag == 0 for v in values):
            values = tuple(float(complex(v).real) for v in values)
        else:
            values = tuple(complex(v) for v in values)
        object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls, partition: Partition) -> "StepFunction":
        return cls(partition, (0.0,) * partition.n_cells)

    @classmethod
    def indicator(cls, partition: Partition, cell: int, value: float = 1.0) -> "StepFunction":
        vals = [0.0] * partition.n_cells
        vals[cell] = value
        return cls(partition, tuple(vals))

    @property
    def is_real(self) -> bool:
        return all(isinstance(v, float) for v in self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float if self.is_real else complex)

    def scaled(self, c: Union[float, complex]) -> "StepFunction":
        return StepFunction(self.partition, tuple(c * v for v in self.values))

    def refine(self, k: int) -> "StepFunction":
        vals = []
        for v in self.values:
            vals.extend([v] * k)
        return StepFunction(self.partition.refine(k), tuple(vals))

    def integral(self) -> Union[float, complex]:
        """<f, 1> = sum_k t_k * lambda_k."""
        value = np.dot(self.partition.lengths, self.as_array())
        return float(value) if self.is_real else complex(value)

    def to_dict(self) -> Dict[str, Any]:
        if self.is_real:
            values = list(self.values)
        else:
            values = [[v.real, v.imag] for v in self.values]
        return {"edges": list(self.partition.edges), "values": values}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def parse_step_spec(spec: Union[str, Dict[str, Any]]) -> Union[Partition, StepFunction]:
    """
    Parse {"edges": [...], "values": [...]}; without values a Partition is returned.
    Complex values are given as [re, im] pairs.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    if "edges" not in spec:
        raise DomainError("step spec needs an 'edges' list")
    partition = Partition(tuple(spec["edges"]))
    values = spec.get("values")
    if values is None:
        return partition
    parsed = [complex(v[0], v[1]) if isinstance(v, (list, tuple)) else v for v in values]
    return StepFunction(partition, tuple(parsed))


# =============================================================================
# CHARACTERISTIC FUNCTIONAL
# =============================================================================

def log_cf(theta: StepFunction) -> complex:
    """-sum_k t_k log(1 - i lambda_k), principal branch."""
    lam = np.asarray(theta.values, dtype=complex)
    z = 1.0 - 1j * lam
    for k, zk in enumerate(z):
        if zk.imag == 0.0 and zk.real <= 0.0:
            raise BranchError(k, complex(zk))
    return complex(-np.sum(theta.partition.lengths * np.log(z)))


def cf(theta: StepFunction) -> complex:
    """Characteristic functional C(theta) = exp(log_cf(theta))."""
    return complex(np.exp(log_cf(theta)))


# =============================================================================
# GAMMA FUNCTION AND DENSITY
# =============================================================================

_LANCZOS_G = 7.0
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
_GAMMA_MAX_ARG = 171.6
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_parts(z: float) -> Tuple[float, float]:
    """Series sum and shifted argument t = z + g - 0.5 of the Lanczos form, z >= 0.5."""
    z -= 1.0
    x = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        x += c / (z + i)
    return x, z + _LANCZOS_G + 0.5


def _log_gamma_lanczos(z: float) -> float:
    x, t = _lanczos_parts(z)
    return 0.5 * math.log(2.0 * math.pi) + (z - 0.5) * math.log(t) - t + math.log(x)


def _gamma_lanczos(z: float) -> float:
    # t^(z-1/2) taken as two halves; neither overflows before e^(-t) is applied
    x, t = _lanczos_parts(z)
    half = t ** (0.5 * (z - 0.5))
    return _SQRT_TWO_PI * half * (half * math.exp(-t)) * x


def gamma_function(t: float) -> float:
    """Gamma(t) for t in (0, 171.6] by the Lanczos approximation (g=7, 9 terms)."""
    if not t > 0:
        raise DomainError(f"gamma_function needs t > 0, got {t!r}")
    if t > _GAMMA_MAX_ARG:
        raise DomainError(f"Gamma({t!r}) overflows a double")
    if t < 0.5:
        # reflection
        return math.pi / (math.sin(math.pi * t) * _gamma_lanczos(1.0 - t))
    return _gamma_lanczos(t)


def log_gamma(t: float) -> float:
    """log Gamma(t) for any t > 0."""
    if not t > 0:
        raise DomainError(f"log_gamma needs t > 0, got {t!r}")
    if t < 0.5:
        return math.log(gamma_function(t))
    return _log_gamma_lanczos(t)


def gamma_density(t: float, s: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """s^(t-1) e^(-s) / Gamma(t) on s > 0, zero elsewhere; normalised in log space."""
    if not t > 0:
        raise DomainError(f"gamma shape must be positive, got {t!r}")
    s_arr = np.asarray(s, dtype=float)
    log_norm = log_gamma(t)
    positive = s_arr > 0
    safe = np.where(positive, s_arr, 1.0)
    out = np.where(positive, np.exp((t - 1.0) * np.log(safe) - safe - log_norm), 0.0)
    return float(out) if out.ndim == 0 else out


# =============================================================================
# LEVY TRIPLE
# =============================================================================

def levy_density(u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """e^(-u)/u on (0, inf), zero elsewhere."""
    u_arr = np.asarray(u, dtype=float)
    positive = u_arr > 0
    safe = np.where(positive, u_arr, 1.0)
    out = np.where(positive, np.exp(-safe) / safe, 0.0)
    return float(out) if out.ndim == 0 else out


def levy_tail_mass(delta: float) -> float:
    """beta((delta, inf)) = int_delta^inf e^(-u)/u du, via u = e^v."""
    if not delta > 0:
        raise DomainError(f"the Levy measure is infinite near 0; need delta > 0, got {delta!r}")
    lower = math.log(delta)
    if lower >= _LOG_UPPER:
        return 0.0
    value, abserr = integrate.quad(
        lambda v: math.exp(-math.exp(v)), lower, _LOG_UPPER,
        epsabs=QUAD_EPSABS, epsrel=1e-13, limit=200,
    )
    logger.debug("levy_tail_mass(%g) = %.15g (abserr %.1e)", delta, value, abserr)
    return value


def levy_small_jump_mean(delta: float) -> float:
    """int_0^delta u dbeta(u) = 1 - e^(-delta)."""
    if not delta > 0:
        raise DomainError(f"need delta > 0, got {delta!r}")
    return -math.expm1(-delta)


def levy_large_jump_mean(delta: float) -> float:
    """int_delta^inf u dbeta(u) = e^(-delta): mean jump mass per unit time above delta."""
    if not delta > 0:
        raise DomainError(f"need delta > 0, got {delta!r}")
    return math.exp(-delta)


def levy_khinchine_exponent(lam: float, t: float) -> complex:
    """t * int_0^inf (e^(iu lam) - 1) e^(-u)/u du, by quadrature."""
    if not t > 0:
        raise DomainError(f"need t > 0, got {t!r}")

    def real_part(u: float) -> float:
        return (math.cos(u * lam) - 1.0) * math.exp(-u) / u

    def imag_part(u: float) -> float:
        return math.sin(u * lam) * math.exp(-u) / u

    re, _ = integrate.quad(real_part, 0.0, np.inf, epsabs=QUAD_EPSABS, limit=400)
    im, _ = integrate.quad(imag_part, 0.0, np.inf, epsabs=QUAD_EPSABS, limit=400)
    return complex(t * re, t * im)


@dataclass(frozen=True)
class LevyTriple:
    """Levy triple (a, sigma^2, beta) of the gamma process."""
    drift: float
    gaussian: float = 0.0
    density: Callable[[Any], Any] = field(default=levy_density, repr=False)

    def first_moment(self) -> float:
        """m_1(beta) = int_0^inf u dbeta(u)."""
        value, _ = integrate.quad(lambda u: u * self.density(u), 0.0, np.inf, epsabs=QUAD_EPSABS)
        return value


def levy_triple() -> LevyTriple:
    """The triple with drift a = int_0^inf e^(-u)/(1+u^2) du, kept for reference only."""
    drift, _ = integrate.quad(lambda u: math.exp(-u) / (1.0 + u * u), 0.0, np.inf, epsabs=QUAD_EPSABS)
    return LevyTriple(drift=drift)


@dataclass(frozen=True)
class LevyMeasureReport:
    deltas: tuple
    tail_masses: tuple
    infinite_total_mass: bool
    finite_tails: bool
    first_moment: float
    unit_first_moment: bool

    @property
    def ok(self) -> bool:
        return self.infinite_total_mass and self.finite_tails and self.unit_first_moment


def levy_measure_conditions(deltas: Optional[Sequence[float]] = None) -> LevyMeasureReport:
    """
    Probe the conditions on beta behind the path statements: beta is infinite,
    every tail beyond delta is finite and m_1(beta) = 1.
    """
    if deltas is None:
        deltas = tuple(10.0 ** -k for k in range(0, 13, 2))
    deltas = tuple(sorted((float(d) for d in deltas), reverse=True))
    masses = tuple(levy_tail_mass(d) for d in deltas)
    # E1(delta) ~ log(1/delta) - Euler gamma: unbounded growth as delta -> 0
    growing = all(b > a for a, b in zip(masses, masses[1:]))
    unbounded = masses[-1] > math.log(1.0 / deltas[-1]) - 1.0
    first_moment = levy_triple().first_moment()
    report = LevyMeasureReport(
        deltas=deltas,
        tail_masses=masses,
        infinite_total_mass=growing and unbounded,
        finite_tails=all(math.isfinite(m) for m in masses),
        first_moment=first_moment,
        unit_first_moment=abs(first_moment - 1.0) <= 1e-10,
    )
    logger.info("Levy measure conditions: %s", "ok" if report.ok else "FAILED")
    return report


# =============================================================================
# ALPHA MAPS
# =============================================================================

def alpha_mu_series(n_max: int) -> np.ndarray:
    """Power-series coefficients of lambda/(lambda - 1): [0, -1, -1, ...]."""
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    out = -np.ones(n_max + 1)
    out[0] = 0.0
    return out


def poisson_alpha_series(n_max: int) -> np.ndarray:
    """Coefficients of log(1 + lambda), the map that yields Charlier polynomials for Poisson noise."""
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    m = np.arange(n_max + 1, dtype=float)
    out = np.zeros(n_max + 1)
    out[1:] = (-1.0) ** (m[1:] + 1) / m[1:]
    return out
