# -*- coding: utf-8 -*-
"""
Gamma Verhulst Wick-Skorokhod equation

    Y_t = Y_0 + r int_0^t Y <> (1 - Y) ds + a int_0^t Y <> (1 - Y) <> xi'_s ds

solved two independent ways: the closed form in the Wick algebra, and a
classical RK4 integration of the S-transformed equation coefficient by
coefficient. Under the S-transform xi'_s becomes 1 - theta(s), so the
S-coefficients obey

    s' = (r + a) (s - s*s) - a * shift_{k(t)}(s - s*s)

where * is the truncated polynomial product and shift_k multiplies by the
step value of the cell containing t.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .core_model import Partition
from .errors import DomainError, SingularElementError, TruncationLossError
from .utils.export import write_csv
from .utils.quadrature import gauss_legendre
from .utils.rng import block_generator
from .utils.series import multi_index_set
from .wick import ChaosElement, expectation, variance, wick_inv, wick_mul

logger = logging.getLogger(__name__)

__all__ = [
    "VerhulstConfig",
    "VerhulstTrajectory",
    "MomentRow",
    "UniquenessReport",
    "logistic",
    "exponential_element",
    "closed_form_solution",
    "closed_form_trajectory",
    "ode_solve",
    "max_discrepancy",
    "moment_report",
    "moments_to_csv",
    "coefficients_to_csv",
    "residual_check",
    "richardson_check",
    "uniqueness_probe",
]

DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class VerhulstConfig:
    """Parameters of one Verhulst solve."""
    r: float
    a: float
    y0: ChaosElement
    t_grid: tuple
    dt: float = DEFAULT_DT
    max_truncation_loss: float = 1.0

    def __post_init__(self):
        grid = tuple(float(t) for t in self.t_grid)
        object.__setattr__(self, "t_grid", grid)
        if self.a < 0:
            raise DomainError(f"noise intensity must be nonnegative, got a={self.a!r}")
        if self.y0.s_coeffs[0] == 0.0:
            raise SingularElementError("initial value violates the solvability hypothesis")
        if not grid:
            raise DomainError("t_grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("t_grid must be strictly increasing")
        if grid[0] < 0 or grid[-1] > self.partition.horizon:
            raise DomainError(f"t_grid must lie in [0, {self.partition.horizon!r}]")
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt!r}")

    @property
    def partition(self) -> Partition:
        return self.y0.partition

    @property
    def N(self) -> int:
        return self.y0.N

    def with_y0(self, y0: ChaosElement) -> "VerhulstConfig":
        return VerhulstConfig(self.r, self.a, y0, self.t_grid, self.dt, self.max_truncation_loss)


@dataclass(frozen=True)
class VerhulstTrajectory:
    times: tuple
    elements: tuple
    losses: tuple

    def __len__(self) -> int:
        return len(self.times)

    def s_matrix(self) -> np.ndarray:
        return np.vstack([e.s_coeffs for e in self.elements])


@dataclass(frozen=True)
class MomentRow:
    t: float
    mean: float
    variance: float
    truncation_loss: float


def logistic(y0: float, rate: float, t: float) -> float:
    """Scalar logistic y' = rate * y (1 - y)."""
    return y0 / (y0 + (1.0 - y0) * math.exp(-rate * t))


# =============================================================================
# CLOSED FORM
# =============================================================================

def exponential_element(r: float, a: float, t: float, partition: Partition, N: int) -> ChaosElement:
    """
    Element with S-transform exp{-(r + a) t + a sum_k lam_k w_k(t)}:
    s_n = e^{-(r+a)t} prod_k (a w_k(t))^{n_k} / n_k!.
    """
    if t < 0 or t > partition.horizon:
        raise DomainError(f"time {t!r} outside the partition horizon [0, {partition.horizon!r}]")
    index_set = multi_index_set(partition.n_cells, N)
    w = a * partition.overlap(t)
    A = index_set.indices
    factorials = np.array([math.factorial(int(v)) for v in A.ravel()], dtype=float).reshape(A.shape)
    s = math.exp(-(r + a) * t) * np.prod(w[None, :] ** A / factorials, axis=1)
    return ChaosElement(partition, N, s)


def closed_form_solution(cfg: VerhulstConfig, t: float) -> ChaosElement:
    """[1 + (Y_0^{<>(-1)} - 1) <> E_t]^{<>(-1)}, truncated at N."""
    inv_y0 = wick_inv(cfg.y0)
    E_t = exponential_element(cfg.r, cfg.a, t, cfg.partition, cfg.N)
    inner = 1.0 + wick_mul(inv_y0 - 1.0, E_t)
    if inner.s_coeffs[0] == 0.0:
        raise SingularElementError("closed form hits a singular intermediate element", time=t)
    result = wick_inv(inner, time=t)
    if result.truncation_loss > cfg.max_truncation_loss:
        raise TruncationLossError(result.truncation_loss, cfg.max_truncation_loss, time=t)
    return result


def closed_form_trajectory(cfg: VerhulstConfig) -> VerhulstTrajectory:
    elements = tuple(closed_form_solution(cfg, t) for t in cfg.t_grid)
    return VerhulstTrajectory(cfg.t_grid, elements, tuple(e.truncation_loss for e in elements))


# =============================================================================
# COEFFICIENT ODE
# =============================================================================

def _rhs(s: np.ndarray, cfg: VerhulstConfig, cell: int) -> Tuple[np.ndarray, float]:
    """Right-hand side and the l1 rate at which truncation drops mass from it."""
    index_set = multi_index_set(cfg.partition.n_cells, cfg.N)
    square, dropped = index_set.multiply(s, s)
    g = s - square
    shifted, shift_dropped = index_set.shift(g, cell)
    rate = (abs(cfg.r + cfg.a) + cfg.a) * dropped + cfg.a * shift_dropped
    return (cfg.r + cfg.a) * g - cfg.a * shifted, rate


def _breakpoints(cfg: VerhulstConfig) -> List[float]:
    t_end = cfg.t_grid[-1]
    points = {0.0, *cfg.t_grid}
    points.update(u for u in cfg.partition.edges if 0.0 < u < t_end)
    return sorted(p for p in points if p <= t_end)


def ode_solve(cfg: VerhulstConfig) -> VerhulstTrajectory:
    """
    RK4 on the S-coefficient system. Steps never straddle a partition edge,
    so the active cell is constant inside every step. The truncation loss is
    the l1 mass dropped so far, integrated with the same RK4 weights and
    started from the loss carried by y0.
    """
    s = cfg.y0.s_coeffs.copy()
    wanted = set(cfg.t_grid)
    times, elements, losses = [], [], []
    loss = cfg.y0.truncation_loss

    def record(t: float) -> None:
        times.append(t)
        elements.append(ChaosElement(cfg.partition, cfg.N, s, loss))
        losses.append(loss)

    if 0.0 in wanted:
        record(0.0)
    points = _breakpoints(cfg)
    for lo, hi in zip(points[:-1], points[1:]):
        cell = cfg.partition.cell_of(0.5 * (lo + hi))
        n_steps = max(1, math.ceil((hi - lo) / cfg.dt - 1e-9))
        h = (hi - lo) / n_steps
        for step in range(n_steps):
            k1, l1 = _rhs(s, cfg, cell)
            k2, l2 = _rhs(s + 0.5 * h * k1, cfg, cell)
            k3, l3 = _rhs(s + 0.5 * h * k2, cfg, cell)
            k4, l4 = _rhs(s + h * k3, cfg, cell)
            loss += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4)
            if loss > cfg.max_truncation_loss:
                raise TruncationLossError(loss, cfg.max_truncation_loss, time=lo + (step + 1) * h)
            s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if hi in wanted:
            record(hi)
    logger.info("ode_solve: %d output times, accumulated truncation loss %.3e", len(times), loss)
    return VerhulstTrajectory(tuple(times), tuple(elements), tuple(losses))


def max_discrepancy(first: VerhulstTrajectory, second: VerhulstTrajectory) -> float:
    """sup over shared times and multi-indices of |s_first - s_second|."""
    if first.times != second.times:
        raise DomainError("trajectories are sampled on different time grids")
    return float(np.max(np.abs(first.s_matrix() - second.s_matrix())))


# =============================================================================
# REPORTS
# =============================================================================

def moment_report(trajectory: VerhulstTrajectory) -> List[MomentRow]:
    return [
        MomentRow(t=t, mean=expectation(e), variance=variance(e), truncation_loss=loss)
        for t, e, loss in zip(trajectory.times, trajectory.elements, trajectory.losses)
    ]


def moments_to_csv(rows: Sequence[MomentRow], target: Union[str, Path]) -> Path:
    return write_csv(target, ["t", "mean", "variance", "truncation_loss"],
                     ((r.t, r.mean, r.variance, r.truncation_loss) for r in rows))


def coefficients_to_csv(trajectory: VerhulstTrajectory, target: Union[str, Path]) -> Path:
    """Full per-time dump in graded-lex order: t,multiindex,c,s_coeff."""
    def rows():
        for t, element in zip(trajectory.times, trajectory.elements):
            for idx, c, s in zip(element.index_set.indices, element.coeffs, element.s_coeffs):
                yield t, tuple(int(v) for v in idx), float(c), float(s)
    return write_csv(target, ["t", "multiindex", "c", "s_coeff"], rows())


# =============================================================================
# VALIDATION PROBES
# =============================================================================

def residual_check(cfg: VerhulstConfig, times: Optional[Sequence[float]] = None,
                   n_nodes: int = 12) -> float:
    """
    Max over times and coefficients of |Y(t) - Y(0) - int_0^t rhs(Y(s)) ds| for
    the closed form, integrating each cell segment by Gauss-Legendre.
    """
    times = cfg.t_grid if times is None else tuple(times)
    y_start = closed_form_solution(cfg, 0.0).s_coeffs
    worst = 0.0
    for t in times:
        cuts = [0.0] + [u for u in cfg.partition.edges if 0.0 < u < t] + [t]
        integral = np.zeros_like(y_start)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi <= lo:
                continue
            cell = cfg.partition.cell_of(0.5 * (lo + hi))
            nodes, weights = gauss_legendre(n_nodes, lo, hi)
            for node, weight in zip(nodes, weights):
                value, _ = _rhs(closed_form_solution(cfg, node).s_coeffs, cfg, cell)
                integral += weight * value
        residual = closed_form_solution(cfg, t).s_coeffs - y_start - integral
        worst = max(worst, float(np.max(np.abs(residual))))
    logger.info("integral-equation residual: %.3e", worst)
    return worst


def richardson_check(cfg: VerhulstConfig) -> float:
    """Max coefficient difference between dt and dt/2 integrations."""
    coarse = ode_solve(cfg)
    fine = ode_solve(VerhulstConfig(cfg.r, cfg.a, cfg.y0, cfg.t_grid, cfg.dt / 2.0,
                                    cfg.max_truncation_loss))
    return max_discrepancy(coarse, fine)


@dataclass(frozen=True)
class UniquenessReport:
    perturbation: float
    response: float
    random_discrepancies: tuple = field(default_factory=tuple)

    @property
    def sensitivity(self) -> float:
        return self.response / self.perturbation

    @property
    def max_discrepancy(self) -> float:
        return max(self.random_discrepancies, default=0.0)


def uniqueness_probe(cfg: VerhulstConfig, eps: float = 1e-6, n_random: int = 10,
                     seed: int = 0) -> UniquenessReport:
    """
    Perturb the initial S-coefficients by eps and measure the response, then
    compare closed form and ODE for n_random admissible random initial values.
    """
    rng = block_generator(seed, "verhulst-uniqueness", 0)
    base = ode_solve(cfg)
    direction = rng.standard_normal(cfg.y0.s_coeffs.size)
    direction /= np.max(np.abs(direction))
    bumped = ChaosElement(cfg.partition, cfg.N, cfg.y0.s_coeffs + eps * direction)
    response = max_discrepancy(base, ode_solve(cfg.with_y0(bumped)))

    index_set = multi_index_set(cfg.partition.n_cells, cfg.N)
    discrepancies = []
    for _ in range(n_random):
        coeffs = np.zeros(len(index_set))
        coeffs[0] = rng.uniform(0.2, 0.9)
        for k in range(cfg.partition.n_cells):
            coeffs[index_set.unit(k)] = rng.uniform(-0.1, 0.1)
        trial = cfg.with_y0(ChaosElement.from_coeffs(cfg.partition, cfg.N, coeffs))
        discrepancies.append(max_discrepancy(closed_form_trajectory(trial), ode_solve(trial)))
    report = UniquenessReport(perturbation=eps, response=response,
                              random_discrepancies=tuple(discrepancies))
    logger.info("uniqueness probe: sensitivity %.3g, max discrepancy %.3e",
                report.sensitivity, report.max_discrepancy)
    return report
