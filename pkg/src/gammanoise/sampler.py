# -*- coding: utf-8 -*-
"""
Gamma process simulation two independent ways (exact Gamma increments and a
truncated compound-Poisson jump sampler), Monte Carlo estimation of the
characteristic functional, and the path statistics of the law of large
numbers / unboundedness statements.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from .core_model import Partition, StepFunction, levy_small_jump_mean, levy_tail_mass
from .errors import DomainError, PartitionMismatchError
from .utils.export import write_csv, write_json
from .utils.rng import BLOCK_SIZE, block_generator, iter_blocks

logger = logging.getLogger(__name__)

__all__ = [
    "GammaPath",
    "PathBatch",
    "McEstimate",
    "JumpSizeTable",
    "marsaglia_tsang",
    "sample_increments",
    "sample_increment_batch",
    "sample_jumps",
    "sample_jump_batch",
    "empirical_cf",
    "lln_statistic",
    "boundedness_probe",
    "ks_against_gamma",
    "ks_two_sample",
    "poisson_count_check",
    "atomic_representation_check",
    "paths_to_csv",
    "estimate_to_json",
]

TABLE_UPPER = 40.0
TABLE_KNOTS = 4096


# =============================================================================
# PATH TYPES
# =============================================================================

@dataclass(frozen=True)
class GammaPath:
    """One sampled trajectory, either as cell increments or as a jump list."""
    horizon: float
    partition: Optional[Partition] = None
    increments: Optional[np.ndarray] = None
    jump_times: Optional[np.ndarray] = None
    jump_sizes: Optional[np.ndarray] = None
    delta: Optional[float] = None

    @property
    def kind(self) -> str:
        return "increments" if self.increments is not None else "jumps"

    def value_at(self, time: float) -> float:
        """y(time) = mass accumulated on [0, time]."""
        if self.kind == "jumps":
            return float(np.sum(self.jump_sizes[self.jump_times <= time]))
        w = self.partition.overlap(time) / self.partition.lengths
        if not np.all((w == 0.0) | (w == 1.0)):
            raise DomainError(f"time {time!r} is not a partition edge")
        return float(np.dot(w, self.increments))


@dataclass(frozen=True)
class PathBatch:
    """
    Vectorized storage of many GammaPath values of one kind.

    Increment batches hold an (n, d) array; jump batches hold flat time/size
    arrays grouped by path through ``offsets`` (path i owns
    offsets[i]:offsets[i+1]), jumps sorted by time inside each path.
    """
    horizon: float
    partition: Optional[Partition] = None
    increments: Optional[np.ndarray] = None
    jump_times: Optional[np.ndarray] = None
    jump_sizes: Optional[np.ndarray] = None
    offsets: Optional[np.ndarray] = None
    delta: Optional[float] = None

    @property
    def kind(self) -> str:
        return "increments" if self.increments is not None else "jumps"

    def __len__(self) -> int:
        if self.kind == "increments":
            return int(self.increments.shape[0])
        return int(self.offsets.size - 1)

    def path(self, i: int) -> GammaPath:
        if not 0 <= i < len(self):
            raise IndexError(f"path {i} out of range for batch of {len(self)}")
        if self.kind == "increments":
            return GammaPath(horizon=self.horizon, partition=self.partition,
                             increments=self.increments[i].copy())
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return GammaPath(horizon=self.horizon, jump_times=self.jump_times[lo:hi].copy(),
                         jump_sizes=self.jump_sizes[lo:hi].copy(), delta=self.delta)

    def __iter__(self):
        for i in range(len(self)):
            yield self.path(i)

    def owners(self) -> np.ndarray:
        """Path index of every jump."""
        return np.repeat(np.arange(len(self)), np.diff(self.offsets))

    def jump_counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    def to_increments(self, partition: Partition) -> np.ndarray:
        """Per-cell increments (n, d); jumps beyond the partition horizon are ignored."""
        if self.kind == "increments":
            if partition != self.partition:
                raise PartitionMismatchError("increment batch lives on a different partition")
            return self.increments
        if partition.horizon > self.horizon:
            raise PartitionMismatchError(
                f"partition horizon {partition.horizon!r} exceeds path horizon {self.horizon!r}"
            )
        d = partition.n_cells
        inside = self.jump_times < partition.horizon
        cells = np.searchsorted(partition.edges, self.jump_times[inside], side="right") - 1
        flat = self.owners()[inside] * d + cells
        out = np.bincount(flat, weights=self.jump_sizes[inside], minlength=len(self) * d)
        return out.reshape(len(self), d)

    @classmethod
    def from_paths(cls, paths: Sequence[GammaPath]) -> "PathBatch":
        if not paths:
            raise DomainError("empty path collection")
        first = paths[0]
        if first.kind == "increments":
            for p in paths:
                if p.partition != first.partition:
                    raise PartitionMismatchError("paths live on different partitions")
            return cls(horizon=first.horizon, partition=first.partition,
                       increments=np.vstack([p.increments for p in paths]))
        counts = np.array([p.jump_times.size for p in paths])
        return cls(horizon=min(p.horizon for p in paths),
                   jump_times=np.concatenate([p.jump_times for p in paths]),
                   jump_sizes=np.concatenate([p.jump_sizes for p in paths]),
                   offsets=np.concatenate([[0], np.cumsum(counts)]),
                   delta=max(p.delta for p in paths))


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate with its (complex) standard error."""
    value: complex
    stderr: float
    n_samples: int
    truncation_bias: float = 0.0

    def to_dict(self) -> dict:
        return {
            "value_re": float(np.real(self.value)),
            "value_im": float(np.imag(self.value)),
            "stderr": float(self.stderr),
            "n": int(self.n_samples),
            "truncation_bias": float(self.truncation_bias),
        }


# =============================================================================
# GAMMA VARIATES
# =============================================================================

def marsaglia_tsang(shape: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Gamma(shape, 1) variates by the squeeze/acceptance method, vectorized.
    Shapes below one use Gamma(t) = Gamma(t + 1) * U^(1/t).
    """
    shape = np.asarray(shape, dtype=float)
    if np.any(shape <= 0):
        raise DomainError("gamma shapes must be positive")
    flat_shape = shape.ravel()
    boost = flat_shape < 1.0
    a = np.where(boost, flat_shape + 1.0, flat_shape)
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(a)
    pending = np.arange(a.size)
    while pending.size:
        x = rng.standard_normal(pending.size)
        u = rng.random(pending.size)
        v = 1.0 + c[pending] * x
        valid = v > 0.0
        v3 = np.where(valid, v, 1.0) ** 3
        dp = d[pending]
        with np.errstate(divide="ignore"):
            log_u = np.log(u)
        squeeze = u < 1.0 - 0.0331 * x ** 4
        full = log_u < 0.5 * x * x + dp * (1.0 - v3 + np.log(v3))
        accept = valid & (squeeze | full)
        out[pending[accept]] = dp[accept] * v3[accept]
        pending = pending[~accept]
    if boost.any():
        u = rng.random(int(boost.sum()))
        with np.errstate(divide="ignore"):
            out[boost] *= np.exp(np.log(u) / flat_shape[boost])
    return out.reshape(shape.shape)


def sample_increment_batch(partition: Partition, n_paths: int, seed: int) -> PathBatch:
    """n_paths independent paths G_k ~ Gamma(t_k, 1), one per cell."""
    if n_paths < 1:
        raise DomainError(f"need at least one path, got {n_paths}")
    shapes = np.broadcast_to(partition.lengths, (BLOCK_SIZE, partition.n_cells))
    blocks = []
    for block, keep in iter_blocks(n_paths):
        rng = block_generator(seed, "increments", block)
        blocks.append(marsaglia_tsang(shapes, rng)[:keep])
    increments = np.concatenate(blocks, axis=0)
    logger.debug("sampled %d increment paths on %d cells", n_paths, partition.n_cells)
    return PathBatch(horizon=partition.horizon, partition=partition, increments=increments)


def sample_increments(partition: Partition, seed: int) -> GammaPath:
    """One increment-form path; identical to path 0 of any batch with the same seed."""
    return sample_increment_batch(partition, 1, seed).path(0)


# =============================================================================
# JUMP SAMPLER
# =============================================================================

@dataclass(frozen=True)
class JumpSizeTable:
    """
    Inverse CDF of the density e^(-u)/u normalised on (delta, inf).

    Knots are log-spaced on (delta, TABLE_UPPER]; the inverse is linear in
    log u between knots. Beyond TABLE_UPPER sizes come from an exact
    rejection sampler (proposal L + Exp(1), accept with L/u). For
    delta >= TABLE_UPPER the table is empty and every size is drawn by
    rejection above L = delta.
    """
    delta: float
    log_knots: np.ndarray
    cdf: np.ndarray
    total_mass: float

    @property
    def tail_probability(self) -> float:
        if self.cdf.size == 0:
            return 1.0
        return float(1.0 - self.cdf[-1])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.cdf.size == 0:
            return _exponential_tail(rng, size, self.delta)
        u = rng.random(size)
        out = np.exp(np.interp(u, self.cdf, self.log_knots))
        in_tail = u > self.cdf[-1]
        n_tail = int(in_tail.sum())
        if n_tail:
            out[in_tail] = _exponential_tail(rng, n_tail, TABLE_UPPER)
        return out


def _exponential_tail(rng: np.random.Generator, size: int, lower: float) -> np.ndarray:
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        proposal = lower + rng.exponential(1.0, pending.size)
        accept = rng.random(pending.size) < lower / proposal
        out[pending[accept]] = proposal[accept]
        pending = pending[~accept]
    return out


@lru_cache(maxsize=16)
def jump_size_table(delta: float) -> JumpSizeTable:
    if not delta > 0:
        raise DomainError(f"jump truncation needs delta > 0, got {delta!r}")
    if delta >= TABLE_UPPER:
        total = float(special.exp1(delta))
        logger.debug("jump table delta=%g: above table range, mass %.12g", delta, total)
        return JumpSizeTable(delta=delta, log_knots=np.empty(0), cdf=np.empty(0), total_mass=total)
    knots = np.geomspace(delta, TABLE_UPPER, TABLE_KNOTS)
    e1_delta = special.exp1(delta)
    cdf = (e1_delta - special.exp1(knots)) / e1_delta
    cdf[0] = 0.0
    total = levy_tail_mass(delta)
    logger.debug("jump table delta=%g: mass %.12g, tail prob %.3e", delta, total, 1.0 - cdf[-1])
    return JumpSizeTable(delta=delta, log_knots=np.log(knots), cdf=cdf, total_mass=total)


def sample_jump_batch(horizon: float, delta: float, n_paths: int, seed: int) -> PathBatch:
    """
    Compound-Poisson paths keeping only jumps above delta: per path
    N ~ Poisson(T * beta((delta, inf))), times uniform on [0, T].
    """
    if not horizon > 0:
        raise DomainError(f"horizon must be positive, got {horizon!r}")
    if not delta > 0:
        raise DomainError(f"jump truncation needs delta > 0 (infinite activity), got {delta!r}")
    if n_paths < 1:
        raise DomainError(f"need at least one path, got {n_paths}")
    table = jump_size_table(float(delta))
    rate = horizon * table.total_mass
    all_counts, all_times, all_sizes = [], [], []
    for block, keep in iter_blocks(n_paths):
        rng = block_generator(seed, "jumps", block)
        counts = rng.poisson(rate, BLOCK_SIZE)
        total = int(counts.sum())
        times = rng.uniform(0.0, horizon, total)
        sizes = table.sample(rng, total)
        n_kept = int(counts[:keep].sum())
        owners = np.repeat(np.arange(keep), counts[:keep])
        order = np.lexsort((times[:n_kept], owners))
        all_counts.append(counts[:keep])
        all_times.append(times[:n_kept][order])
        all_sizes.append(sizes[:n_kept][order])
    counts = np.concatenate(all_counts)
    batch = PathBatch(
        horizon=float(horizon),
        jump_times=np.concatenate(all_times),
        jump_sizes=np.concatenate(all_sizes),
        offsets=np.concatenate([[0], np.cumsum(counts)]),
        delta=float(delta),
    )
    logger.info(
        "sampled %d jump paths on [0, %g], delta=%g: %d jumps, truncation bias per path <= %.3e",
        n_paths, horizon, delta, int(counts.sum()), horizon * levy_small_jump_mean(delta),
    )
    return batch


def sample_jumps(horizon: float, delta: float, seed: int) -> GammaPath:
    """One jump-form path; identical to path 0 of any batch with the same seed."""
    return sample_jump_batch(horizon, delta, 1, seed).path(0)


# =============================================================================
# ESTIMATORS
# =============================================================================

def _as_batch(paths: Union[PathBatch, Sequence[GammaPath]]) -> PathBatch:
    return paths if isinstance(paths, PathBatch) else PathBatch.from_paths(list(paths))


def empirical_cf(paths: Union[PathBatch, Sequence[GammaPath]], theta: StepFunction) -> McEstimate:
    """(1/n) sum exp{i <x, theta>} with its standard error."""
    batch = _as_batch(paths)
    lam = theta.as_array()
    if not theta.is_real:
        raise DomainError("Monte Carlo characteristic functional needs a real theta")
    if batch.kind == "increments":
        if batch.partition != theta.partition:
            raise PartitionMismatchError("theta and the increment paths use different partitions")
        x = batch.increments @ lam
        bias = 0.0
    else:
        x = batch.to_increments(theta.partition) @ lam
        bias = float(np.max(np.abs(lam), initial=0.0) * theta.partition.horizon
                     * levy_small_jump_mean(batch.delta))
    n = x.size
    z_re = np.cos(x)
    z_im = np.sin(x)
    value = complex(np.mean(z_re), np.mean(z_im))
    if n > 1:
        stderr = math.sqrt((np.var(z_re, ddof=1) + np.var(z_im, ddof=1)) / n)
    else:
        stderr = 0.0
    if bias:
        logger.info("jump-based estimate: truncation bias in <x, theta> at most %.3e", bias)
    return McEstimate(value=value, stderr=stderr, n_samples=n, truncation_bias=bias)


def lln_statistic(tau: float, n_paths: int, band: float, seed: int) -> float:
    """Fraction of paths with |y(tau)/tau - 1| <= band, y(tau) ~ Gamma(tau)."""
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    batch = sample_increment_batch(Partition((0.0, tau)), n_paths, seed)
    y = batch.increments[:, 0]
    return float(np.mean(np.abs(y / tau - 1.0) <= band))


def boundedness_probe(tau_grid: Sequence[float], n_paths: int, seed: int) -> np.ndarray:
    """
    Running max over the grid of |y(tau) - tau|, shape (n_paths, len(tau_grid));
    column j is the max over tau_grid[:j + 1].
    """
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("tau_grid must be a nonempty 1-d sequence")
    if not np.all(np.diff(grid) > 0) or grid[0] <= 0:
        raise DomainError("tau_grid must be positive and strictly increasing")
    batch = sample_increment_batch(Partition((0.0, *grid.tolist())), n_paths, seed)
    y = np.cumsum(batch.increments, axis=1)
    return np.maximum.accumulate(np.abs(y - grid[None, :]), axis=1)


# =============================================================================
# GOODNESS OF FIT
# =============================================================================

def ks_against_gamma(samples: np.ndarray, t: float) -> Tuple[float, float]:
    """Kolmogorov-Smirnov statistic and p-value against Gamma(t, 1)."""
    result = stats.kstest(np.asarray(samples), stats.gamma(t).cdf)
    return float(result.statistic), float(result.pvalue)


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> Tuple[float, float]:
    result = stats.ks_2samp(np.asarray(a), np.asarray(b))
    return float(result.statistic), float(result.pvalue)


def poisson_count_check(batch: PathBatch) -> float:
    """z-score of the mean jump count against T * beta((delta, inf))."""
    if batch.kind != "jumps":
        raise DomainError("jump counts need a jump batch")
    expected = batch.horizon * levy_tail_mass(batch.delta)
    counts = batch.jump_counts()
    return float((counts.mean() - expected) / math.sqrt(expected / counts.size))


def atomic_representation_check(path: GammaPath) -> bool:
    """Jump path is a finite sum of positive point masses inside [0, T] above delta."""
    if path.kind != "jumps":
        return bool(np.all(path.increments >= 0.0))
    return bool(
        np.all(path.jump_sizes > path.delta)
        and np.all((path.jump_times >= 0.0) & (path.jump_times <= path.horizon))
        and np.all(np.diff(path.jump_times) >= 0.0)
    )


# =============================================================================
# EXPORT
# =============================================================================

def paths_to_csv(path: GammaPath, target: Union[str, Path]) -> Path:
    """Increment form: cell_index,length,increment. Jump form: time,size."""
    if path.kind == "increments":
        rows = zip(range(path.partition.n_cells), path.partition.lengths, path.increments)
        return write_csv(target, ["cell_index", "length", "increment"], rows)
    return write_csv(target, ["time", "size"], zip(path.jump_times, path.jump_sizes))


def estimate_to_json(estimate: McEstimate, target: Union[str, Path]) -> Path:
    return write_json(target, estimate.to_dict())
