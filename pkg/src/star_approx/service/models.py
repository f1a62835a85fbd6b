"""Request and response models for the service API."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

from ..errors import ConfigError
from ..problems import ProblemConfig


class ProblemConfigModel(BaseModel):
    """Wire form of a problem configuration; mirrors the JSON config file."""

    name: str = ""
    description: str = ""
    interval: tuple[float, float]
    dimension: int = Field(ge=1)
    entries: dict[str, Union[str, tuple[str, str]]] = {}
    initial_vector: list[Union[float, tuple[float, float]]]
    degrees: tuple[int, int] = (0, 8)
    tol: float = 1e-13
    chi: Union[float, Literal["optimize"]] = 2.0
    seed: int = 0
    force_match: bool = False
    output: str = ""

    @field_validator("interval")
    @classmethod
    def _ordered(cls, v):
        if not v[0] < v[1]:
            raise ValueError(f"empty interval {v}")
        return v

    def to_config(self) -> ProblemConfig:
        return ProblemConfig.from_dict(self.model_dump())

    @classmethod
    def from_config(cls, cfg: ProblemConfig) -> "ProblemConfigModel":
        return cls.model_validate(cfg.to_dict())


class SweepOverrides(BaseModel):
    degrees: Optional[tuple[int, int]] = None
    tol: Optional[float] = None
    chi: Optional[Union[float, Literal["optimize"]]] = None
    seed: Optional[int] = None


class SweepRequest(BaseModel):
    """Either a bundled problem name or an inline configuration."""

    problem: Optional[str] = None
    config: Optional[ProblemConfigModel] = None
    overrides: SweepOverrides = SweepOverrides()
    threads: int = Field(default=1, ge=1, le=64)
    include_timing: bool = False

    def resolve(self) -> ProblemConfig:
        from ..problems import load_config
        if (self.problem is None) == (self.config is None):
            raise ConfigError("provide exactly one of 'problem' or 'config'")
        cfg = (load_config(self.problem) if self.problem is not None
               else self.config.to_config())
        data = cfg.to_dict()
        for name in ("degrees", "tol", "chi", "seed"):
            val = getattr(self.overrides, name)
            if val is not None:
                data[name] = val
        return ProblemConfig.from_dict(data)


class SweepRowModel(BaseModel):
    n: int
    measured_l2: float
    peano_baker_l2: float
    channel_bound: float
    En_bound: float
    bernstein_fixed: float
    bernstein_opt: float
    commutation_residual: float
    wall_ms: float


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    manifest: dict
    csv: str
    bound_asserted: bool


class BoundsRowModel(BaseModel):
    n: int
    En_bound: float
    bernstein_fixed: float
    bernstein_opt: float


class BoundsResponse(BaseModel):
    rows: list[BoundsRowModel]
    spectral_interval: tuple[float, float]
    manifest: dict
    csv: str


class VerifyRequest(BaseModel):
    suite: str


class CheckModel(BaseModel):
    name: str
    passed: bool
    ms: float
    detail: str = ""


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    checks: list[CheckModel]


class ProblemInfo(BaseModel):
    name: str
    description: str
    dimension: int
    interval: tuple[float, float]


class HealthResponse(BaseModel):
    status: str
    version: str
