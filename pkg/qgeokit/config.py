# qgeokit/config.py
# Geometry constants shared by every numeric operation, and the run document model.
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from qgeokit.errors import ConfigError

DEFAULT_ALPHA = 0.5
DEFAULT_BOUNDARY_FLOOR = 1e-9
DEFAULT_FD_STEP = 1e-6


class GeometryConfig(BaseModel):
    """The constant alpha, the number of states, and the numerical knobs.

    alpha is kept free (0.5 is only the customary value). Operations always
    receive the config explicitly.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(DEFAULT_ALPHA, gt=0)
    n: int = Field(2, ge=2)
    boundary_floor: float = Field(DEFAULT_BOUNDARY_FLOOR, gt=0)
    fd_step: float = Field(DEFAULT_FD_STEP, gt=0)
    curvature_step: float = Field(1e-4, gt=0)
    curvature_order: int = 4

    @model_validator(mode="after")
    def _check_floor(self):
        if self.boundary_floor >= 1.0 / self.n:
            raise ValueError(f"boundary_floor must be < 1/n = {1.0 / self.n}")
        if self.curvature_order not in (2, 4):
            raise ValueError("curvature_order must be 2 or 4")
        return self


def make_config(**kwargs) -> GeometryConfig:
    """Build a GeometryConfig, turning pydantic validation errors into ConfigError."""
    try:
        return GeometryConfig(**kwargs)
    except ValidationError as e:
        raise ConfigError(f"invalid geometry config: {e}") from e


class RunConfig(BaseModel):
    """A validated run document. Sub-objects hold the command-specific parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    n: int = Field(3, ge=2, le=64)
    alpha: float = Field(DEFAULT_ALPHA, gt=0)
    seed: int = Field(0, ge=0)
    samples: int = Field(25, ge=1)
    out_dir: str = "out"
    boundary_floor: float = Field(DEFAULT_BOUNDARY_FLOOR, gt=0)
    fd_step: float = Field(DEFAULT_FD_STEP, gt=0)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    distance: Dict[str, Any] = Field(default_factory=dict)
    kahler: Dict[str, Any] = Field(default_factory=dict)
    evolve: Dict[str, Any] = Field(default_factory=dict)
    oracle: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("tolerances")
    @classmethod
    def _positive(cls, v: Dict[str, float]) -> Dict[str, float]:
        bad = sorted(k for k, t in v.items() if not t > 0)
        if bad:
            raise ValueError(f"tolerances must be > 0: {', '.join(bad)}")
        return v

    def tol(self, key: str) -> float:
        return self.tolerances[key]

    def geometry(self, n: Optional[int] = None) -> GeometryConfig:
        return make_config(alpha=self.alpha, n=n or self.n, boundary_floor=self.boundary_floor,
                           fd_step=self.fd_step)
