"""Configuration management for SCLV Lab.

Run configurations are YAML files validated into pydantic models; process-wide settings
come from the environment (optionally a ``.env`` file).
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Literal, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, model_validator

from .exceptions import ConfigError
from .models import GromovCondition, SignatureMode, TheoremKind

# Load environment variables from .env file
load_dotenv()

MetricFamily = Literal[
    "minkowski", "euclidean", "space_form", "lorentzian_space_form", "grw", "conformal"
]


class WarpingConfig(BaseModel):
    """Warping function of a GRW spacetime."""

    form: Literal["cosh", "exp", "cos", "poly"] = "cosh"
    coeffs: list[float] = Field(default_factory=lambda: [1.0, 1.0])


class MetricConfig(BaseModel):
    """Builtin metric family and its parameters."""

    family: MetricFamily
    dim: Optional[int] = Field(default=None, ge=2)
    c: float = 0.0
    f: Optional[WarpingConfig] = None
    k_F: float = 0.0
    m: Optional[int] = Field(default=None, ge=1, le=3)
    interval: Optional[tuple[float, float]] = None
    a: float = 0.0
    base: str = "minkowski"
    base_point: Optional[list[float]] = None

    @model_validator(mode="after")
    def check_family_fields(self) -> "MetricConfig":
        if self.family == "grw":
            if self.m is None:
                raise ValueError("grw metrics need the fiber dimension m")
            if self.f is None:
                self.f = WarpingConfig()
        elif self.dim is None:
            raise ValueError(f"{self.family} metrics need dim")
        return self

    @property
    def n(self) -> int:
        if self.family == "grw":
            assert self.m is not None
            return self.m + 1
        assert self.dim is not None
        return self.dim


class CutConfig(BaseModel):
    """Cut function: a constant, a table on the quadrature nodes, or a smooth two-level step."""

    form: Literal["constant", "table", "two_level"] = "constant"
    value: float = Field(default=1.0, gt=0)
    values: list[float] = Field(default_factory=list)
    low: float = Field(default=1.0, gt=0)
    high: float = Field(default=2.0, gt=0)
    width: float = Field(default=0.1, gt=0)

    @model_validator(mode="after")
    def check_table(self) -> "CutConfig":
        if self.form == "table" and (not self.values or min(self.values) <= 0):
            raise ValueError("table cut functions need positive values on every node")
        return self


class SCLVConfig(BaseModel):
    """Star-shaped subset: direction set, cut function and model constant."""

    dim: int = Field(ge=2)
    mode: SignatureMode = SignatureMode.LORENTZIAN_TIMELIKE
    c: float = 0.0
    chi_max: Optional[float] = Field(default=None, gt=0)
    cut: CutConfig = Field(default_factory=CutConfig)
    rapidity_panels: int = Field(default=8, ge=4)
    azimuth_nodes: int = Field(default=8, ge=2)
    polar_nodes: int = Field(default=4, ge=1)
    scale_bound: float = Field(default=1.0, ge=1.0)


class TheoremConfig(BaseModel):
    """Theorem selection for the verify and ratio commands."""

    name: TheoremKind = TheoremKind.GUENTHER
    c: Optional[float] = None
    r_grid: list[float] = Field(default_factory=lambda: [0.2, 0.4, 0.6, 0.8, 1.0])
    condition: Optional[GromovCondition] = None


class ToleranceConfig(BaseModel):
    """Numerical tolerances; the integrator tolerance falls back to SCLV_DEFAULT_TOL."""

    integrator: Optional[float] = Field(default=None, gt=0)
    audit: float = Field(default=1e-6, gt=0)
    slack: float = Field(default=1e-6, gt=0)
    monotone_slack: float = Field(default=1e-8, gt=0)


class OutputConfig(BaseModel):
    """Where and how reports are written."""

    out_dir: str = "out"
    format: Literal["json", "csv", "both"] = "both"
    dump_directions: list[int] = Field(default_factory=list)


class SearchConfig(BaseModel):
    """Family of two-level cut functions scanned for ratio increases."""

    budget: int = Field(default=16, ge=1)
    c_values: list[float] = Field(default_factory=lambda: [1.0])
    cut_pairs: list[tuple[float, float]] = Field(default_factory=lambda: [(1.0, 2.0)])
    chi_max: float = Field(default=0.5, gt=0)
    width: float = Field(default=0.1, gt=0)
    threshold: float = Field(default=1e-6, gt=0)


class OracleConfig(BaseModel):
    """Monte-Carlo oracle settings."""

    samples: int = Field(default=200_000, ge=1)
    seed: int = 0
    scale: float = Field(default=1.0, gt=0)


class ExpandConfig(BaseModel):
    """Small-t expansion fits and the optional comparison metric."""

    window: tuple[float, float] = (0.02, 0.2)
    compare_with: Optional[MetricConfig] = None
    ball_radii: list[float] = Field(default_factory=list)
    t_window: float = Field(default=1.0, gt=0)


class RunConfig(BaseModel):
    """A complete laboratory run."""

    metric: MetricConfig
    sclv: SCLVConfig
    theorem: TheoremConfig = Field(default_factory=TheoremConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    search: Optional[SearchConfig] = None
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    expand: ExpandConfig = Field(default_factory=ExpandConfig)

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if self.metric.n != self.sclv.dim:
            raise ValueError(
                f"sclv.dim = {self.sclv.dim} does not match the metric dimension {self.metric.n}"
            )
        b = self.sclv.scale_bound
        grid = self.theorem.r_grid
        if any(r <= 0 or r > b for r in grid):
            raise ValueError(f"theorem.r_grid must lie in (0, {b}], got {grid}")
        if any(r1 >= r2 for r1, r2 in zip(grid, grid[1:])):
            raise ValueError("theorem.r_grid must be strictly increasing")
        name = self.theorem.name
        if name in (TheoremKind.GROMOV_A, TheoremKind.GROMOV_B):
            expected = GromovCondition.A if name is TheoremKind.GROMOV_A else GromovCondition.B
            if self.theorem.condition not in (None, expected):
                raise ValueError(f"theorem {name.value} uses condition {expected.value}")
            self.theorem.condition = expected
        return self

    @property
    def config_hash(self) -> str:
        return config_hash(self)


class Settings(BaseModel):
    """Process-wide settings from the environment."""

    log_level: str = Field(default="INFO")
    threads: int = Field(default=1, ge=1)
    default_tol: float = Field(default=1e-10, gt=0)


def config_hash(config: RunConfig) -> str:
    """SHA-256 of the canonical JSON form of a validated configuration."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _node_line(root: Optional[yaml.Node], loc: tuple[Union[int, str], ...]) -> Optional[int]:
    """1-based line of the deepest YAML node reachable along a validation error location."""
    node = root
    line = None if node is None else node.start_mark.line + 1
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            match = node.value[key]
        else:
            match = None
        if match is None:
            break
        node = match
        line = node.start_mark.line + 1
    return line


def parse_run_config(text: str) -> RunConfig:
    """Parse and validate a YAML run configuration.

    Raises:
        ConfigError: With line and field diagnostics on YAML or validation errors.
    """
    try:
        data: Any = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"invalid YAML: {getattr(e, 'problem', None) or e}", line=line) from e
    if not isinstance(data, dict):
        raise ConfigError("run configuration must be a mapping", line=1)

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first["loc"])
        field = ".".join(str(x) for x in loc) or None
        raise ConfigError(first["msg"], field=field, line=_node_line(root, loc)) from e


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Load a run configuration from a YAML file.

    Raises:
        ConfigError: If the file is missing or invalid.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return parse_run_config(f.read())


def load_settings() -> Settings:
    """Load settings from environment variables.

    Raises:
        ConfigError: If a variable cannot be parsed.
    """
    try:
        return Settings(
            log_level=os.getenv("SCLV_LOG_LEVEL", "INFO").upper(),
            threads=int(os.getenv("SCLV_THREADS", "1")),
            default_tol=float(os.getenv("SCLV_DEFAULT_TOL", "1e-10")),
        )
    except (ValueError, ValidationError) as e:
        raise ConfigError(f"invalid environment setting: {e}") from e


# Singleton settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the process settings (singleton).

    Returns:
        Settings object.
    """
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings
