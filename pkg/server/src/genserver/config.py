"""Server configuration: exactly one serving mode, plus transport knobs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

# mBART-50 style decoder language tokens; override per checkpoint
DEFAULT_LANG_TOKENS = {
    "ar": "ar_AR",
    "de": "de_DE",
    "en": "en_XX",
    "es": "es_XX",
    "fr": "fr_XX",
    "it": "it_IT",
    "ja": "ja_XX",
    "ko": "ko_KR",
    "th": "th_TH",
    "zh": "zh_CN",
}

MODES = ("echo", "lookup", "model")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServerConfig:
    mode: str
    mode_arg: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8750
    max_batch: int = 64
    lang_tokens: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_LANG_TOKENS))

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode in ("lookup", "model") and not self.mode_arg:
            raise ConfigError(f"{self.mode} mode needs a path argument")
        if self.mode == "echo" and self.mode_arg:
            raise ConfigError("echo mode takes no argument")
        if self.max_batch < 1:
            raise ConfigError("max_batch must be >= 1")

    @classmethod
    def from_mode_string(cls, mode: str, **kwargs) -> "ServerConfig":
        """Parse `echo`, `lookup:PATH` or `model:PATH`."""
        if ":" in mode:
            kind, arg = mode.split(":", 1)
            return cls(mode=kind, mode_arg=arg, **kwargs)
        return cls(mode=mode, **kwargs)


def load_lang_tokens(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("language token map must be a JSON object")
    return {str(k): str(v) for k, v in data.items()}
