"""
Saturable Battery Simulator - Configuration

BatterySettings holds process-level settings read from the environment (BATTERY_*) and
.env; RunConfig is the flat, per-command configuration built from defaults, a preset,
a TOML config file and command-line overrides, in increasing order of precedence.
"""

import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from core.dynamics import Integrator, check_time_grid
from core.errors import ConfigError, InvalidTimeGrid
from core.model import ModelParams
from utils.mappings import get_preset

logger = logging.getLogger(__name__)

MODEL_FIELDS = tuple(ModelParams.model_fields)
DRIVE_FREQ_TOL = 1e-12


class BatterySettings(BaseSettings):
    """Process settings, e.g. BATTERY_OUTPUT_DIR=results BATTERY_JOBS=4."""
    model_config = SettingsConfigDict(env_prefix="BATTERY_", env_file=".env", extra="ignore")

    output_dir: Path = Path("results")
    jobs: Optional[int] = Field(default=None, ge=1)
    log_level: str = "INFO"
    log_file: Optional[str] = None
    transport: Literal["stdio", "sse", "streamable-http"] = "stdio"
    host: str = "0.0.0.0"
    port: int = 8000

    def resolved_jobs(self) -> int:
        return self.jobs or os.cpu_count() or 1


class RunConfig(BaseModel):
    """Everything one command needs, as a single flat document.

    Model parameters sit at the top level next to the sweep, time grid and output
    options, so a config file reads as plain `key = value` lines.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    # model
    omega: float = 1.0
    detuning: float = 0.1
    drive_freq: Optional[float] = None
    chi: float = 1.0
    n_s: float = Field(default=0.0, ge=0.0)
    alpha: float = 0.5
    gamma: float = Field(default=0.2, ge=0.0)
    dim: int = Field(default=40, ge=2)
    nonlinearity: Literal["saturable", "kerr"] = "saturable"

    # sweep
    preset: Optional[str] = None
    sweep_param: Optional[str] = None
    sweep_values: Optional[List[float]] = None
    gamma_values: Optional[List[float]] = None

    # time grid
    tau_start: float = 0.0
    tau_stop: float = 100.0
    tau_count: int = Field(default=2001, ge=1)
    tau_list: Optional[List[float]] = None
    snapshot_times: List[float] = Field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0])

    # wigner
    wigner_extent: float = Field(default=4.0, gt=0.0)
    wigner_points: int = Field(default=101, ge=2)

    # numerics
    integrator: Integrator = "rk45"
    rtol: float = Field(default=1e-9, gt=0.0)
    atol: float = Field(default=1e-12, gt=0.0)
    steady_method: Literal["eig", "bordered"] = "eig"
    refine_step: float = Field(default=1e-3, gt=0.0)
    check_dim_step: int = Field(default=10, ge=1)

    # outputs
    outputs: Path = Path("results")
    format: Literal["csv", "json"] = "csv"
    truncation_check: bool = False
    include_kerr: bool = False
    spectrum_levels: int = Field(default=31, ge=2)
    compare_max_energy: bool = False
    jobs: Optional[int] = Field(default=None, ge=1)

    @field_validator("sweep_param")
    @classmethod
    def _known_sweep_param(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in MODEL_FIELDS:
            raise ValueError(f"sweep_param must be one of {list(MODEL_FIELDS)}, got '{v}'")
        return v

    @field_validator("sweep_values", "gamma_values")
    @classmethod
    def _non_empty(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and not v:
            raise ValueError("value list must not be empty")
        return v

    @model_validator(mode="before")
    @classmethod
    def _resolve_drive_freq(cls, data: Any) -> Any:
        """Accept drive_freq in place of detuning; reject inconsistent triples."""
        if not isinstance(data, dict) or data.get("drive_freq") is None:
            return data
        data = dict(data)
        omega = float(data.get("omega", 1.0))
        implied = omega - float(data["drive_freq"])
        if "detuning" in data and abs(float(data["detuning"]) - implied) > DRIVE_FREQ_TOL:
            raise ValueError(
                f"detuning={data['detuning']} is inconsistent with omega={omega}, "
                f"drive_freq={data['drive_freq']} (expected {implied})"
            )
        data["detuning"] = implied
        data["drive_freq"] = None
        return data

    @model_validator(mode="after")
    def _check_grid(self) -> "RunConfig":
        if self.tau_list is None and self.tau_count > 1 and self.tau_stop <= self.tau_start:
            raise ValueError(f"tau_stop ({self.tau_stop}) must exceed tau_start ({self.tau_start})")
        try:
            check_time_grid(self.tau_grid())
            if self.snapshot_times:
                check_time_grid(self.snapshot_times)
        except InvalidTimeGrid as exc:
            raise ValueError(str(exc)) from exc
        return self

    @model_validator(mode="after")
    def _check_sweep_points(self) -> "RunConfig":
        try:
            self.sweep_points()
        except ValidationError as exc:
            bad = "; ".join(f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors())
            raise ValueError(f"sweep contains an invalid point ({bad})") from None
        return self

    @property
    def params(self) -> ModelParams:
        return ModelParams(**{name: getattr(self, name) for name in MODEL_FIELDS})

    def charging_window(self) -> Tuple[float, int]:
        """(τ_max, point count) of the coarse scan used to locate the energy maximum."""
        grid = self.tau_grid()
        if grid.size < 2 or grid[-1] <= 0:
            raise ConfigError(
                f"Locating the energy maximum needs a time grid with at least 2 points ending after 0, "
                f"got {grid.size} point(s) ending at {float(grid[-1])}"
            )
        return float(grid[-1]), int(grid.size)

    def tau_grid(self) -> np.ndarray:
        if self.tau_list is not None:
            return np.asarray(self.tau_list, dtype=float)
        return np.linspace(self.tau_start, self.tau_stop, self.tau_count)

    def sweep_points(self) -> List[Tuple[Dict[str, float], ModelParams]]:
        """Parameter points of the sweep, as (coordinates, params) in sweep order.

        The sweep axis varies fastest; gamma_values, when given, is an outer axis.
        A config without a sweep yields its single point.
        """
        base = self.params
        gammas = self.gamma_values if self.gamma_values is not None else [None]
        if self.sweep_param is not None and self.sweep_values is not None:
            axis = [(self.sweep_param, v) for v in self.sweep_values]
        else:
            axis = [(None, None)]

        points = []
        for g in gammas:
            for name, value in axis:
                changes: Dict[str, Any] = {}
                if g is not None:
                    changes["gamma"] = g
                if name is not None:
                    changes[name] = int(value) if name == "dim" else value
                p = base.with_updates(**changes) if changes else base
                coords = {"n_s": p.n_s, "gamma": p.gamma}
                if name is not None and name not in coords:
                    coords[name] = changes[name]
                points.append((coords, p))
        return points

    def resolved(self) -> Dict[str, Any]:
        """JSON-ready dump used for sidecars."""
        data = self.model_dump(mode="json")
        data["drive_freq"] = self.params.drive_freq
        return data


def parse_override(item: str) -> Tuple[str, Any]:
    """Parse one `key=value` override; the value uses TOML syntax, bare words are strings."""
    if "=" not in item:
        raise ConfigError(f"Override '{item}' is not of the form key=value")
    key, raw = (part.strip() for part in item.split("=", 1))
    if not key:
        raise ConfigError(f"Override '{item}' has an empty key")
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def read_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"Config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Config file {path} is not valid TOML: {exc}") from exc

    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(f"Config file {path} must be flat; found tables: {nested}")
    return data


def build_run_config(
    path: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    preset: Optional[str] = None,
) -> RunConfig:
    """Merge defaults < preset < config file < overrides into a validated RunConfig."""
    file_values = read_config_file(Path(path)) if path else {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    preset_name = overrides.get("preset") or file_values.get("preset") or preset
    merged: Dict[str, Any] = {}
    if preset_name:
        try:
            merged.update(get_preset(preset_name))
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from exc
        merged["preset"] = preset_name
    merged.update(file_values)
    merged.update(overrides)

    try:
        config = RunConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {exc}") from exc
    logger.debug(f"Resolved config: {config.resolved()}")
    return config


def load_run_config(path: Optional[Path] = None, overrides: Optional[List[str]] = None,
                    **flags: Any) -> RunConfig:
    """CLI entry: `--set key=value` items and explicit flags override the file."""
    values: Dict[str, Any] = {}
    for item in overrides or []:
        key, value = parse_override(item)
        values[key] = value
    values.update({k: v for k, v in flags.items() if v is not None})
    return build_run_config(path, values)
