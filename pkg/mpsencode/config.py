"""Configuration management: process settings from the environment and per-run configs."""
from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError
from .funcspace.distributions import DistributionKind, DistributionSpec

ROOT_DIR = Path(__file__).resolve().parents[1]

SCHEMA_VERSION = 1


class Settings(BaseSettings):
    """Process-wide defaults loaded from MPSENCODE_* environment variables."""

    model_config = SettingsConfigDict(
        # Always the single root-level .env file, regardless of working directory.
        env_file=ROOT_DIR / ".env",
        env_prefix="MPSENCODE_",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"
    log_dir: str = "logs"
    applicationinsights_connection_string: Optional[str] = None

    # Outputs
    output_dir: str = "runs"

    # Numerical defaults
    chi_max: int = 64  # dense SVD bond cap
    chi_sim: int = 64  # MPS simulator bond cap
    workers: int = 1  # sweep points evaluated concurrently in `reproduce`


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()


class DistributionParams(BaseModel):
    """Distribution parameters as accepted on the CLI and in run configs."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: DistributionKind
    mu: float = 0.0
    scale: float = 1.0  # sigma for normal / log-normal, c for Levy, theta for Gamma
    shape: float = 1.0  # Gamma shape k
    L: float = Field(1.0, gt=0.0, description="support length")
    n_qubits: int = Field(10, ge=1, le=64)

    def to_spec(self) -> DistributionSpec:
        return DistributionSpec(
            kind=self.kind,
            mu=self.mu,
            scale=self.scale,
            shape=self.shape,
            support_length=self.L,
        )


class TciSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_rank: int = Field(32, ge=2)
    tol: float = Field(1e-8, gt=0.0)
    max_sweeps: int = Field(12, ge=1)
    n_error_samples: int = Field(256, ge=1)
    seed: int = 0


class RunConfig(BaseModel):
    """One pipeline run. Round-trips through JSON; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    distribution: DistributionParams
    builder: Literal["svd", "tci"] = "svd"
    chi_max: int = Field(64, ge=1)
    eps_svd: float = Field(0.0, ge=0.0)
    tci: TciSettings = Field(default_factory=TciSettings)
    n_layers: int = Field(2, ge=1)
    origin_policy: Union[Literal["scan"], int] = "scan"
    eps_trunc: float = Field(1e-3, ge=0.0)
    chi_sim: int = Field(64, ge=2)
    u_lambda_budget: int = Field(500, ge=1)
    shots: int = Field(5000, ge=1)
    ks_samples: int = Field(200, ge=1)
    seed: int = 0
    output_dir: str = "runs"

    @field_validator("origin_policy")
    @classmethod
    def _origin_positive(cls, value):
        if isinstance(value, int) and value < 1:
            raise ValueError("fixed origin must be a bond index >= 1")
        return value

    @model_validator(mode="after")
    def _origin_in_range(self) -> "RunConfig":
        n = self.distribution.n_qubits
        if isinstance(self.origin_policy, int) and n > 1 and self.origin_policy > n - 1:
            raise ValueError(f"fixed origin {self.origin_policy} outside bonds 1..{n - 1}")
        return self

    def encode_key(self) -> Dict[str, Any]:
        """The fields an MPS depends on, as JSON values. Encode artifacts record it."""
        if self.builder == "tci":
            fields = {"distribution", "builder", "tci"}
        else:
            fields = {"distribution", "builder", "chi_max", "eps_svd"}
        return self.model_dump(mode="json", include=fields)

    def circuit_key(self) -> Dict[str, Any]:
        """encode_key plus the circuit construction fields."""
        key = self.encode_key()
        key.update(
            self.model_dump(mode="json", include={"n_layers", "origin_policy", "eps_trunc", "chi_sim", "u_lambda_budget"})
        )
        return key

    @classmethod
    def from_env_defaults(cls, **overrides) -> "RunConfig":
        """Build a config whose unspecified numeric defaults come from Settings."""
        settings = get_settings()
        values = {
            "chi_max": settings.chi_max,
            "chi_sim": settings.chi_sim,
            "output_dir": settings.output_dir,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            raise ConfigError(str(e)) from e

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read run config {path}: {e}") from e
        version = raw.get("schema_version", SCHEMA_VERSION) if isinstance(raw, dict) else None
        if version != SCHEMA_VERSION:
            raise ConfigError(f"Unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(str(e)) from e

    def to_file(self, path: Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
