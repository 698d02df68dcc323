"""App configuration: JSON file + TABLEREAD_* env vars + explicit overrides.

Precedence: explicit overrides (CLI flags) > environment > config file >
defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .offline import OfflineProvider
from .providers import HttpProvider, Provider, ProviderConfig, ScriptedProvider, Transcript

ENV_PREFIX = "TABLEREAD_"

_PROVIDER_FIELDS = {
    "endpoint": str,
    "model": str,
    "credential_env": str,
    "timeout": float,
    "max_retries": int,
    "embedding_model": str,
    "embedding_dimension": int,
    "temperature_generate": float,
    "temperature_evaluate": float,
}

_APP_FIELDS = {
    "provider": str,  # offline | http | scripted
    "transcript": str,
    "store_root": str,
    "host": str,
    "port": int,
}


@dataclass(frozen=True)
class AppConfig:
    provider: str = "offline"
    transcript: str | None = None
    store_root: str = "tableread-data"
    host: str = "127.0.0.1"
    port: int = 8000
    provider_config: ProviderConfig = ProviderConfig()

    def __post_init__(self) -> None:
        if self.provider not in ("offline", "http", "scripted"):
            raise ValueError(f"unknown provider kind: {self.provider!r}")
        if self.provider == "scripted" and not self.transcript:
            raise ValueError("scripted provider requires a transcript path")


def _coerce(value: str, typ) -> object:
    return typ(value)


def load_app_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, object] | None = None,
) -> AppConfig:
    env = os.environ if env is None else env
    merged: dict[str, object] = {}

    if path is not None:
        merged.update(json.loads(Path(path).read_text(encoding="utf-8")))

    for name, typ in {**_APP_FIELDS, **_PROVIDER_FIELDS}.items():
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            merged[name] = _coerce(raw, typ)

    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    provider_kwargs = {k: merged[k] for k in _PROVIDER_FIELDS if k in merged}
    app_kwargs = {k: merged[k] for k in _APP_FIELDS if k in merged}
    return AppConfig(provider_config=ProviderConfig(**provider_kwargs), **app_kwargs)


def build_provider(config: AppConfig) -> Provider:
    if config.provider == "offline":
        return OfflineProvider(config.provider_config)
    if config.provider == "http":
        return HttpProvider(config.provider_config)
    transcript = Transcript.load(config.transcript)
    return ScriptedProvider(transcript, config.provider_config)
