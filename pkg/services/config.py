"""Run configuration: defaults, JSON file, environment and flags.

Precedence: flags > JSON config file > defaults. BICWAVE_OUT (also read from
a .env file) replaces the output directory unless --out is given.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from physics.errors import ConfigError

log = logging.getLogger(__name__)

OUT_ENV = "BICWAVE_OUT"
DEFAULT_OUT = "bicwave_out"

# Fields that do not change computed numbers and stay out of the hash
_UNHASHED = {"output_dir", "svg", "jobs", "verbose"}


@dataclass(frozen=True)
class RunConfig:
    m: float = 1.0
    gamma: float = 0.1
    d: float = 5.0
    n: int = 3
    nu: int = 1
    j: int | None = None
    b1_override: float | None = None
    model_free: bool = False
    E_spec: str = "resonant:1"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    k_max: float | None = None
    max_refinements: int = 500
    grid_per_cell: int = 64
    pad: float | None = None
    n_k: int = 2000
    k_cut: float | None = None
    output_dir: str = DEFAULT_OUT
    svg: bool = False
    jobs: int = 1
    seed: int = 0
    verbose: bool = False


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def _normalize(raw: dict[str, Any]) -> dict[str, Any]:
    """Map CLI-style keys onto RunConfig fields and reject unknown ones."""
    aliases = {"b1": "b1_override", "E": "E_spec", "out": "output_dir", "per_cell": "grid_per_cell"}
    out: dict[str, Any] = {}
    for key, value in raw.items():
        name = aliases.get(key.replace("-", "_"), key.replace("-", "_"))
        if name not in _FIELD_NAMES:
            raise ConfigError(f"unknown configuration key {key!r}")
        out[name] = value
    return out


def _validate(cfg: RunConfig) -> RunConfig:
    if not (cfg.m > 0 and cfg.gamma > 0 and cfg.d > 0):
        raise ConfigError("m, gamma and d must be positive")
    if cfg.n < 1:
        raise ConfigError(f"n must be positive, got {cfg.n}")
    if cfg.nu < 1:
        raise ConfigError(f"nu must be at least 1, got {cfg.nu}")
    if cfg.j is not None and not 1 <= cfg.j <= cfg.n:
        raise ConfigError(f"j must lie in 1..{cfg.n}, got {cfg.j}")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if cfg.model_free and cfg.b1_override is None:
        raise ConfigError("--model-free requires --b1")
    if cfg.m * cfg.d < 1.0:
        log.warning("m·d = %.3g < 1: outside the evanescent-suppression regime", cfg.m * cfg.d)
    return cfg


def load_config(flags: dict[str, Any], config_path: str | None = None) -> RunConfig:
    """Merge defaults, environment, JSON file and explicit flags (None = unset)."""
    load_dotenv()
    merged: dict[str, Any] = {}
    if config_path:
        try:
            file_values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
        merged.update(_normalize(file_values))
    env_out = os.getenv(OUT_ENV)
    if env_out:
        merged["output_dir"] = env_out
    merged.update(_normalize({k: v for k, v in flags.items() if v is not None}))
    try:
        cfg = replace(RunConfig(), **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return _validate(cfg)


def config_hash(cfg: RunConfig) -> str:
    payload = {k: v for k, v in asdict(cfg).items() if k not in _UNHASHED}
    blob = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
