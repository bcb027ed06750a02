"""Run configuration: one file, environment overrides, CLI overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from typing import Mapping, Optional, Sequence

from .dataset import default_directions
from .store import DEFAULT_LANGUAGES

ENV_PREFIX = "POLYKG_"


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class Config:
    languages: tuple[str, ...] = DEFAULT_LANGUAGES
    directions: Optional[tuple[tuple[str, str], ...]] = None
    include_en_en: bool = True
    kgc_fraction: float = 0.5
    seed: int = 13
    num_candidates: int = 10
    k_list: tuple[int, ...] = (1, 3, 10)
    backend: str = "oracle"
    src_lang: str = "en"
    top1_ensemble: bool = False
    batch_size: int = 128
    triplets: Optional[str] = None
    lexical: Optional[str] = None
    relation_labels: Optional[str] = None
    benchmark: Optional[str] = None
    test_triplets: Optional[str] = None
    snapshot: str = "snapshot.jsonl"
    out_dir: str = "out"

    def resolved_directions(self) -> tuple[tuple[str, str], ...]:
        if self.directions is not None:
            return self.directions
        return default_directions(self.languages, include_en_en=self.include_en_en)

    def validate(self) -> None:
        for code in self.languages:
            if not (len(code) == 2 and code.islower()):
                raise ConfigError(f"bad language code {code!r}")
        if len(set(self.languages)) != len(self.languages):
            raise ConfigError("languages must be unique")
        if not 0.0 <= self.kgc_fraction <= 1.0:
            raise ConfigError(f"kgc_fraction must be within [0, 1], got {self.kgc_fraction}")
        if self.num_candidates < 1:
            raise ConfigError("num_candidates must be >= 1")
        if any(k < 1 for k in self.k_list):
            raise ConfigError("every k in k_list must be >= 1")
        if self.src_lang not in self.languages:
            raise ConfigError(f"src_lang {self.src_lang!r} is not among the configured languages")
        for src, tgt in self.resolved_directions():
            if src not in self.languages or tgt not in self.languages:
                raise ConfigError(f"direction {src}->{tgt} uses an unconfigured language")
        if not (
            self.backend == "oracle"
            or self.backend.startswith("static:")
            or self.backend.startswith("remote:")
        ):
            raise ConfigError(f"backend must be oracle, static:PATH or remote:URL, got {self.backend!r}")


def _parse_directions(value: str) -> tuple[tuple[str, str], ...]:
    pairs = []
    for chunk in value.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ">" not in chunk:
            raise ConfigError(f"directions must look like 'en>es', got {chunk!r}")
        src, tgt = chunk.split(">", 1)
        pairs.append((src.strip(), tgt.strip()))
    if not pairs:
        raise ConfigError("empty direction list")
    return tuple(pairs)


def _coerce(name: str, value, target_type) -> object:
    if name == "directions":
        if value is None:
            return None
        if isinstance(value, str):
            return _parse_directions(value)
        return tuple((str(s), str(t)) for s, t in value)
    if name == "languages":
        if isinstance(value, str):
            return tuple(v.strip() for v in value.split(",") if v.strip())
        return tuple(value)
    if name == "k_list":
        if isinstance(value, str):
            return tuple(int(v) for v in value.split(",") if v.strip())
        return tuple(int(v) for v in value)
    if target_type is bool:
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    return value if value is None else str(value)


_FIELD_TYPES = {
    "languages": tuple,
    "directions": tuple,
    "include_en_en": bool,
    "kgc_fraction": float,
    "seed": int,
    "num_candidates": int,
    "k_list": tuple,
    "backend": str,
    "src_lang": str,
    "top1_ensemble": bool,
    "batch_size": int,
    "triplets": str,
    "lexical": str,
    "relation_labels": str,
    "benchmark": str,
    "test_triplets": str,
    "snapshot": str,
    "out_dir": str,
}


def load_config(
    path: Optional[str] = None,
    env: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, object]] = None,
) -> Config:
    """Layered load: defaults, then config file, then POLYKG_* environment
    variables, then explicit overrides (normally CLI flags)."""
    env = os.environ if env is None else env
    values: dict[str, object] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        for key, value in raw.items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = value
    for key in _FIELD_TYPES:
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            values[key] = env[env_key]
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = value
    coerced = {k: _coerce(k, v, _FIELD_TYPES[k]) for k, v in values.items()}
    cfg = replace(Config(), **coerced)
    cfg.validate()
    return cfg


def config_field_names() -> list[str]:
    return [f.name for f in fields(Config)]
