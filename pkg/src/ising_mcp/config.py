from __future__ import annotations

import os
import logging
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import yaml

from ising_mcp.errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_ENV = "ISING_MCP_CONFIG"
DEFAULT_CONFIG_PATH = Path("config.yaml")


@dataclass(frozen=True)
class IntegratorSettings:
    dt: float = 0.01
    noise_amplitude: float = 0.05
    record_stride: int = 10


@dataclass(frozen=True)
class ScheduleSettings:
    K: float = 1.0
    ks_max: float = 5.0
    t_end: float = 50.0


@dataclass(frozen=True)
class EstimateSettings:
    threshold: float = 0.006
    debounce: int = 3
    aggregation: str = "max"
    # The collapsed pi/2 state has to sit well below the threshold, so
    # estimation runs much quieter than the solver.
    noise_amplitude: float = 1.0e-4
    dt: float = 0.005
    record_stride: int = 1


@dataclass(frozen=True)
class OracleSettings:
    n_limit: int = 24


@dataclass(frozen=True)
class HarnessSettings:
    workers: int = 1
    trials: int = 50


@dataclass(frozen=True)
class LoggingSettings:
    level: str = "INFO"


@dataclass(frozen=True)
class Settings:
    logging: LoggingSettings = field(default_factory=LoggingSettings)
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    schedule: ScheduleSettings = field(default_factory=ScheduleSettings)
    estimate: EstimateSettings = field(default_factory=EstimateSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    harness: HarnessSettings = field(default_factory=HarnessSettings)


def _coerce(section: str, default: Any, raw: Any) -> Any:
    if raw is None:
        return default
    if not isinstance(raw, dict):
        raise ConfigError(f"section '{section}' must be a mapping, got {type(raw).__name__}")
    known = {f.name: f for f in fields(default)}
    values: dict[str, Any] = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigError(f"unknown key '{section}.{key}'")
        expected = type(getattr(default, key))
        if expected is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, expected) or isinstance(value, bool) != (expected is bool):
            raise ConfigError(
                f"'{section}.{key}' must be {expected.__name__}, got {type(value).__name__}"
            )
        values[key] = value
    return replace(default, **values)


def settings_from_mapping(data: dict[str, Any] | None) -> Settings:
    base = Settings()
    if not data:
        return base
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    sections = {f.name for f in fields(base)}
    for key in data:
        if key not in sections:
            raise ConfigError(f"unknown section '{key}'")
    return Settings(**{
        name: _coerce(name, getattr(base, name), data.get(name)) for name in sections
    })


def load_settings(path: str | Path | None = None) -> Settings:
    """Read settings from ``path``, ``$ISING_MCP_CONFIG`` or ./config.yaml, in that order."""
    if path is None:
        env_path = os.getenv(CONFIG_ENV)
        path = Path(env_path) if env_path else DEFAULT_CONFIG_PATH
        if not path.exists():
            if env_path:
                raise ConfigError(f"{CONFIG_ENV} points to a missing file: {path}")
            return Settings()
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    logger.debug("Loaded settings from %s", path)
    return settings_from_mapping(data)


def configure_logging(level: str = "INFO") -> None:
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ConfigError(f"unknown log level '{level}'")
    logging.basicConfig(level=numeric, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def format_dt(dt: datetime) -> str:
    return dt.strftime("%Y-%m-%d %H:%M:%S UTC")


def utc_now() -> str:
    return format_dt(datetime.now(timezone.utc))
