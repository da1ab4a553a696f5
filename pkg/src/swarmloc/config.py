"""YAML configuration files for scenarios and benchmarks.

A config file is a mapping with a ``kind`` key (``scenario``, ``stepsize`` or
``geometry``) whose remaining keys mirror the corresponding dataclass fields.
Parsing -> serializing -> parsing is an identity on the dataclass level.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path

import yaml

from .benchmarks import GeometryBenchConfig, StepsizeBenchConfig
from .channel import RangingChannel
from .defense import TadConfig
from .engine import DefenseConfig, ScenarioConfig
from .errors import ConfigError
from .magd import MagdConfig
from .threat import AttackerConfig, AttackMode, AttackStrategy

KINDS = ("scenario", "stepsize", "geometry")


def _build(cls, data, path=""):
    """Construct dataclass cls from a plain mapping, rejecting unknown keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path or cls.__name__}: expected a mapping, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls) if f.init}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{path or cls.__name__}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        if isinstance(value, list):
            value = tuple(value)
        kwargs[name] = value
    return cls(**kwargs)


def _channel(data, path):
    data = dict(data or {})
    data.pop("sigma_d_table", None)  # always rebuilt from parameters
    return _build(RangingChannel, data, path)


def _attacker(data, path):
    if data is None:
        return None
    data = dict(data)
    mode = _build(AttackMode, data.pop("mode", None), f"{path}.mode")
    strategy = _build(AttackStrategy, data.pop("strategy", None), f"{path}.strategy")
    return _build(AttackerConfig, {**data, "mode": mode, "strategy": strategy}, path)


def _defense(data, path):
    data = dict(data or {})
    tad = _build(TadConfig, data.pop("tad", None), f"{path}.tad")
    return _build(DefenseConfig, {**data, "tad": tad}, path)


def scenario_from_dict(data: dict) -> ScenarioConfig:
    data = dict(data or {})
    nested = {
        "channel": _channel(data.pop("channel", None), "channel"),
        "magd": _build(MagdConfig, data.pop("magd", None), "magd"),
        "attacker": _attacker(data.pop("attacker", None), "attacker"),
        "defense": _defense(data.pop("defense", None), "defense"),
    }
    return _build(ScenarioConfig, {**data, **nested}, "scenario")


def stepsize_from_dict(data: dict) -> StepsizeBenchConfig:
    data = dict(data or {})
    nested = {
        "channel": _channel(data.pop("channel", None), "channel"),
        "magd": _build(MagdConfig, data.pop("magd", None), "magd"),
    }
    return _build(StepsizeBenchConfig, {**data, **nested}, "stepsize")


def geometry_from_dict(data: dict) -> GeometryBenchConfig:
    data = dict(data or {})
    nested = {"channel": _channel(data.pop("channel", None), "channel")}
    return _build(GeometryBenchConfig, {**data, **nested}, "geometry")


_BUILDERS = {
    "scenario": scenario_from_dict,
    "stepsize": stepsize_from_dict,
    "geometry": geometry_from_dict,
}


def _clean(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        out = {}
        for f in dataclasses.fields(value):
            if not f.init or f.name.startswith("_") or f.name == "sigma_d_table":
                continue
            out[f.name] = _clean(getattr(value, f.name))
        return out
    if isinstance(value, tuple):
        return [_clean(v) for v in value]
    if isinstance(value, (list, dict)):
        raise ConfigError(f"unexpected container in config: {value!r}")
    return value


def config_to_dict(cfg) -> dict:
    """Plain-YAML representation of a config dataclass, including ``kind``."""
    kind = {ScenarioConfig: "scenario", StepsizeBenchConfig: "stepsize",
            GeometryBenchConfig: "geometry"}.get(type(cfg))
    if kind is None:
        raise ConfigError(f"not a known config type: {type(cfg).__name__}")
    return {"kind": kind, **_clean(cfg)}


def config_from_dict(data: dict):
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a mapping")
    data = dict(data)
    kind = data.pop("kind", "scenario")
    if kind not in _BUILDERS:
        raise ConfigError(f"unknown config kind {kind!r}; expected one of {KINDS}")
    return _BUILDERS[kind](data)


def load_config(path):
    """Parse and validate a YAML config file."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    try:
        return config_from_dict(data)
    except (ConfigError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def save_config(cfg, path):
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))


def config_hash(cfg) -> str:
    """Stable hash of the config content (order-independent)."""
    payload = json.dumps(config_to_dict(cfg), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def preset_path(name: str) -> Path:
    p = Path(__file__).parent / "presets" / f"{name}.yaml"
    if not p.exists():
        available = sorted(q.stem for q in p.parent.glob("*.yaml"))
        raise ConfigError(f"unknown preset {name!r}; available: {available}")
    return p


def load_preset(name: str):
    return load_config(preset_path(name))
