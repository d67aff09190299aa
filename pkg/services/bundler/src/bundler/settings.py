from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, model_validator

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[4] / "config" / "pipeline.default.json"


class OptimizerParams(BaseModel):
    mu: float = Field(default=1 / math.sqrt(2), gt=0)
    theta: float = Field(default=1.1, gt=1)
    max_escape_attempts: int = Field(default=10, ge=1)
    descent_passes: int = Field(default=2, ge=1)
    descent_step_factor: float = Field(default=0.05, gt=0)
    max_descent_steps: int = Field(default=20, ge=1)
    radius_cap_factor: float = Field(default=4.0, gt=0)
    radius_cap: Optional[float] = Field(default=None, gt=0)


class PipelineConfig(BaseModel):
    # Routing cost weights
    k_ink: float = Field(default=1.0, ge=0)
    k_len: float = Field(default=500.0, ge=0)
    k_cap: Optional[float] = Field(default=None, ge=0)

    # Paths
    path_width: float = Field(default=1.0, ge=0)
    edge_widths: dict[int, float] = Field(default_factory=dict)
    path_separation: float = Field(default=1.0, ge=0)

    # Routing graph
    cone_angle: float = Field(default=math.pi / 6, gt=0, le=2 * math.pi)
    k_max_corners: int = Field(default=8, ge=4)
    ellipse_samples: int = Field(default=16, ge=8)
    padding: Optional[float] = Field(default=None, gt=0)

    # Router
    multi_dp_threshold: int = Field(default=0, ge=0)
    dp_max_terminals: int = Field(default=8, ge=1)

    optimizer: OptimizerParams = Field(default_factory=OptimizerParams)

    ordering: Literal["simple", "linear", "both", "nice"] = "linear"
    seed: int = 0

    @model_validator(mode="after")
    def resolve_derived(self) -> "PipelineConfig":
        if self.k_cap is None:
            self.k_cap = 10 * (self.k_ink + self.k_len)
        if self.padding is None:
            # obstacles need a positive margin to shrink into, even for zero separation
            self.padding = 0.5 * (self.path_separation or self.path_width or 1.0)
        if self.k_ink <= 0 and self.k_len <= 0 and self.k_cap <= 0:
            raise ValueError("at least one of k_ink, k_len, k_cap must be positive")
        return self

    def width_of(self, edge_index: int) -> float:
        return self.edge_widths.get(edge_index, self.path_width)


_ENV_FIELDS: dict[str, tuple[str, type]] = {
    "BUNDLER_K_INK": ("k_ink", float),
    "BUNDLER_K_LEN": ("k_len", float),
    "BUNDLER_K_CAP": ("k_cap", float),
    "BUNDLER_WIDTH": ("path_width", float),
    "BUNDLER_SEPARATION": ("path_separation", float),
    "BUNDLER_CONE_ANGLE": ("cone_angle", float),
    "BUNDLER_ORDERING": ("ordering", str),
    "BUNDLER_SEED": ("seed", int),
}


def load_settings(
    config_path: Optional[str | Path] = None,
    overrides: Optional[dict[str, Any]] = None,
) -> PipelineConfig:
    """Resolve config: defaults < JSON file < BUNDLER_* env < explicit overrides."""
    data: dict[str, Any] = {}
    if config_path is not None:
        with open(config_path) as f:
            raw_file = json.load(f)
        # a stats file from an earlier run carries its resolved config
        if raw_file.get("schema_version") == "bundle_stats.v1":
            raw_file = raw_file.get("config", {})
        data.update(raw_file)
    for env_name, (field, cast) in _ENV_FIELDS.items():
        raw = os.getenv(env_name)
        if raw not in (None, ""):
            data[field] = cast(raw)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "optimizer" and isinstance(value, dict):
            merged = dict(data.get("optimizer", {}))
            merged.update(value)
            data["optimizer"] = merged
        else:
            data[key] = value
    return PipelineConfig(**data)
