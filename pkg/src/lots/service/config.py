"""Service configuration with documented precedence: file < environment <
explicit (CLI) overrides."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from ..config import load_config_file

ENV_PREFIX = "LOTS_"


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8750
    checkpoint_dir: str = "checkpoints"
    data_dir: str = "service_data"
    workers: int = 1
    max_pairs: int = 6
    default_alpha: float = 1.0
    default_steps: int = 50
    autoload: str = ""  # checkpoint id to load on startup, empty = none


def _coerce(value: str, target_type) -> object:
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    return value


def load_service_config(
    config_path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, object] | None = None,
) -> ServiceConfig:
    env = os.environ if env is None else env
    values: dict[str, object] = {}

    if config_path:
        data = load_config_file(config_path)
        data = data.get("service", data)
        for f in dataclasses.fields(ServiceConfig):
            if f.name in data:
                values[f.name] = data[f.name]

    defaults = ServiceConfig()
    for f in dataclasses.fields(ServiceConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            values[f.name] = _coerce(env[key], type(getattr(defaults, f.name)))

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    known = {f.name for f in dataclasses.fields(ServiceConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown service config keys: {sorted(unknown)}")
    return ServiceConfig(**values)
