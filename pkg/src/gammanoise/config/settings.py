"""Config loader for gammanoise runs."""

import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core_model import Partition, StepFunction, parse_step_spec
from ..errors import ConfigurationError
from ..wick import ChaosElement

load_dotenv()

OUT_DIR_ENV = "GAMMANOISE_OUT_DIR"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_edges(edges: List[float]) -> List[float]:
    if len(edges) < 2:
        raise ValueError("a partition needs at least two edges")
    if edges[0] != 0:
        raise ValueError("partition edges must start at 0")
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("partition edges must be strictly increasing")
    return edges


class PartitionSection(_Section):
    """Partition used by `paths`; explicit edges win over horizon/cells."""
    edges: Optional[List[float]] = None
    horizon: float = Field(default=2.0, gt=0)
    cells: int = Field(default=4, ge=1)

    @field_validator("edges")
    @classmethod
    def _edges(cls, v):
        return None if v is None else _check_edges(v)

    def build(self) -> Partition:
        if self.edges is not None:
            return Partition(tuple(self.edges))
        return Partition.uniform(self.horizon, self.cells)


class ThetaSpec(_Section):
    edges: List[float]
    values: List[Union[float, List[float]]]

    @field_validator("edges")
    @classmethod
    def _edges(cls, v):
        return _check_edges(v)

    @model_validator(mode="after")
    def _lengths(self):
        if len(self.values) != len(self.edges) - 1:
            raise ValueError(
                f"theta has {len(self.values)} values for {len(self.edges) - 1} cells"
            )
        for value in self.values:
            if isinstance(value, list) and len(value) != 2:
                raise ValueError("complex theta values are written [re, im]")
        return self

    def build(self) -> StepFunction:
        return parse_step_spec(self.model_dump())


def _default_thetas() -> List[ThetaSpec]:
    return [
        ThetaSpec(edges=[0.0, 2.0], values=[0.5]),
        ThetaSpec(edges=[0.0, 1.0, 3.0], values=[1.0, 2.0]),
        ThetaSpec(edges=[0.0, 0.5], values=[-0.3]),
    ]


class ThetaSection(_Section):
    specs: List[ThetaSpec] = Field(default_factory=_default_thetas)

    @field_validator("specs")
    @classmethod
    def _non_empty(cls, v):
        if not v:
            raise ValueError("cf-check needs at least one theta")
        return v


class MonteCarloSection(_Section):
    samples: int = Field(default=1_000_000, ge=1)


class PathsSection(_Section):
    """Sample export: n_paths of each kind on the global partition."""
    n_paths: int = Field(default=10, ge=1)
    delta: float = Field(default=1e-3, gt=0)


class TruncationSection(_Section):
    """Chaos truncation (d cells on [0, horizon], total degree N) for wick-selftest."""
    cells: int = Field(default=4, ge=1)
    degree: int = Field(default=8, ge=1)
    horizon: float = Field(default=2.0, gt=0)


class LevySection(_Section):
    delta: float = Field(default=1e-6, gt=0)
    samples: int = Field(default=100_000, ge=2)
    horizon: float = Field(default=1.0, gt=0)


class LlnSection(_Section):
    tau: float = Field(default=1e6, gt=0)
    n_paths: int = Field(default=1000, ge=1)
    band: float = Field(default=0.01, gt=0)
    probe_horizons: List[float] = Field(default_factory=lambda: [1e2, 1e4])
    probe_paths: int = Field(default=500, ge=1)

    @field_validator("probe_horizons")
    @classmethod
    def _increasing(cls, v):
        if len(v) < 2 or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("probe_horizons needs at least two increasing horizons")
        return v


class OrthoSection(_Section):
    shapes: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.7])
    n_max: int = Field(default=12, ge=0)
    alpha_degree: int = Field(default=8, ge=0)
    mc_edges: List[float] = Field(default_factory=lambda: [0.0, 0.5, 2.0])
    mc_degree: int = Field(default=3, ge=0)

    @field_validator("shapes")
    @classmethod
    def _positive(cls, v):
        if not v or any(t <= 0 for t in v):
            raise ValueError("Laguerre shapes must be positive")
        return v

    @field_validator("mc_edges")
    @classmethod
    def _edges(cls, v):
        return _check_edges(v)


class WickSection(_Section):
    n_triples: int = Field(default=100, ge=1)
    c0_min: float = Field(default=0.1, gt=0)


class VerhulstSection(_Section):
    r: float = 1.0
    a: float = Field(default=0.5, ge=0)
    horizon: float = Field(default=2.0, gt=0)
    cells: int = Field(default=4, ge=1)
    degree: int = Field(default=6, ge=1)
    y0_constant: float = 0.5
    # J_{e_k} coefficients keyed by 1-based cell number
    y0_linear: Dict[str, float] = Field(default_factory=lambda: {"1": 0.1})
    t_step: float = Field(default=0.1, gt=0)
    dt: float = Field(default=1e-3, gt=0)
    max_truncation_loss: float = Field(default=1.0, gt=0)
    eps: float = Field(default=1e-6, gt=0)
    n_random: int = Field(default=10, ge=0)
    dump_coefficients: bool = False

    @field_validator("y0_constant")
    @classmethod
    def _solvable(cls, v):
        if v == 0:
            raise ValueError("y0_constant must be nonzero (<<Y0, 1>> != 0)")
        return v

    @model_validator(mode="after")
    def _linear_cells(self):
        for key in self.y0_linear:
            if not key.isdigit() or not 1 <= int(key) <= self.cells:
                raise ValueError(f"y0_linear key {key!r} is not a cell number in 1..{self.cells}")
        return self

    def partition(self, refine: int = 1) -> Partition:
        return Partition.uniform(self.horizon, self.cells).refine(refine)

    def t_grid(self) -> tuple:
        n = max(1, round(self.horizon / self.t_step))
        return tuple(self.horizon * i / n for i in range(n + 1))

    def y0(self, refine: int = 1) -> ChaosElement:
        """
        Initial value on the (optionally refined) partition. J_{e_k} of a
        coarse cell equals the sum of J_{e_j} over the cells it splits into.
        """
        partition = self.partition(refine)
        y0 = ChaosElement.constant(partition, self.degree, self.y0_constant)
        for key, c in self.y0_linear.items():
            for j in range((int(key) - 1) * refine, int(key) * refine):
                unit = [0] * partition.n_cells
                unit[j] = 1
                y0 = y0 + ChaosElement.unit(partition, self.degree, tuple(unit), c)
        return y0


class LoggingSection(_Section):
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    @field_validator("level")
    @classmethod
    def _level(cls, v):
        v = v.upper()
        if v not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return v


class ToleranceSection(_Section):
    cf_stderr_multiple: float = 5.0
    ks_pvalue: float = 0.01
    poisson_z: float = 3.0
    levy_khinchine: float = 1e-8
    ortho_quadrature: float = 1e-9
    ortho_stderr_multiple: float = 5.0
    alpha_composition: float = 1e-12
    wick_exact: float = 1e-12
    verhulst_discrepancy: float = 1e-6
    logistic: float = 1e-8
    residual: float = 1e-6
    refinement: float = 1e-8
    lln_fraction: float = 0.98


class RunConfig(_Section):
    """Validated configuration of one CLI run."""
    seed: int = Field(default=20240601, ge=0)
    out_dir: str = "results"
    partition: PartitionSection = Field(default_factory=PartitionSection)
    theta: ThetaSection = Field(default_factory=ThetaSection)
    monte_carlo: MonteCarloSection = Field(default_factory=MonteCarloSection)
    paths: PathsSection = Field(default_factory=PathsSection)
    truncation: TruncationSection = Field(default_factory=TruncationSection)
    levy: LevySection = Field(default_factory=LevySection)
    lln: LlnSection = Field(default_factory=LlnSection)
    ortho: OrthoSection = Field(default_factory=OrthoSection)
    wick: WickSection = Field(default_factory=WickSection)
    verhulst: VerhulstSection = Field(default_factory=VerhulstSection)
    logging: LoggingSection = Field(default_factory=LoggingSection)
    tolerances: ToleranceSection = Field(default_factory=ToleranceSection)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)


def _read(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        if path.suffix == ".toml":
            with open(path, "rb") as f:
                return tomllib.load(f)
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"Invalid TOML syntax: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON syntax: {e}") from e


def load_config(path: Optional[Union[str, Path]] = None, env: bool = True) -> RunConfig:
    """
    Load a RunConfig from JSON (or TOML by suffix). Without a path the
    built-in defaults are used. GAMMANOISE_OUT_DIR overrides out_dir.
    """
    payload = _read(Path(path)) if path is not None else {}
    if env:
        env_out = os.getenv(OUT_DIR_ENV)
        if env_out:
            payload = {**payload, "out_dir": env_out}
    try:
        return RunConfig.model_validate(payload)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid config: {e}") from e


def apply_overrides(
    cfg: RunConfig,
    seed: Optional[int] = None,
    samples: Optional[int] = None,
    cells: Optional[int] = None,
    degree: Optional[int] = None,
    out: Optional[str] = None,
) -> RunConfig:
    """Apply CLI flags on top of a loaded config and revalidate."""
    payload = cfg.model_dump()
    if seed is not None:
        payload["seed"] = seed
    if samples is not None:
        payload["monte_carlo"]["samples"] = samples
        payload["levy"]["samples"] = samples
        payload["paths"]["n_paths"] = samples
    if cells is not None:
        payload["truncation"]["cells"] = cells
        payload["verhulst"]["cells"] = cells
    if degree is not None:
        payload["truncation"]["degree"] = degree
        payload["verhulst"]["degree"] = degree
    if out is not None:
        payload["out_dir"] = out
    try:
        return RunConfig.model_validate(payload)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid override: {e}") from e


def resolve_out_dir(path: Optional[Union[str, Path]] = None, out: Optional[str] = None) -> str:
    """
    Best-effort out_dir for reporting a config that failed to load. Same
    precedence as a valid run (--out, then GAMMANOISE_OUT_DIR, then the
    file) but never raises.
    """
    if out:
        return out
    env_out = os.getenv(OUT_DIR_ENV)
    if env_out:
        return env_out
    if path is not None:
        try:
            raw = _read(Path(path)).get("out_dir")
        except (ConfigurationError, OSError, ValueError, AttributeError):
            raw = None
        if isinstance(raw, str) and raw:
            return raw
    return RunConfig.model_fields["out_dir"].default
