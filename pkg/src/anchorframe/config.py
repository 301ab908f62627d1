"""CLI configuration: one JSON file covering every tunable.

Defaults reproduce the package's reference operating point (margin 0.05,
cycle window 5, pool 5, weights 0.5/0.3/0.2). Unknown keys anywhere in the
file are rejected outright so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .clients import ServiceEndpoint
from .errors import ConfigError
from .scoring import SelectorConfig
from .tracker import TrackerConfig

_BACKENDS = ("mock", "remote")


@dataclass(frozen=True)
class DetectorSettings:
    base_url: str | None = None
    timeout_ms: int = 10000
    max_retries: int = 2
    max_in_flight: int = 4
    jitter: float = 0.0
    score_noise: float = 0.0
    visibility_threshold: float = 0.25

    def endpoint(self) -> ServiceEndpoint:
        if not self.base_url:
            raise ConfigError("detector.base_url is required for the remote backend")
        return ServiceEndpoint(self.base_url, self.timeout_ms, self.max_retries,
                               self.max_in_flight)


@dataclass(frozen=True)
class VlmSettings:
    base_url: str | None = None
    timeout_ms: int = 10000
    max_retries: int = 2
    max_in_flight: int = 4

    def endpoint(self) -> ServiceEndpoint:
        if not self.base_url:
            raise ConfigError("vlm.base_url is required for the remote backend")
        return ServiceEndpoint(self.base_url, self.timeout_ms, self.max_retries,
                               self.max_in_flight)


@dataclass(frozen=True)
class CliConfig:
    selector: SelectorConfig = SelectorConfig()
    tracker: TrackerConfig = TrackerConfig()
    detector: DetectorSettings = DetectorSettings()
    vlm: VlmSettings = VlmSettings()
    backend: str = "mock"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.backend not in _BACKENDS:
            raise ConfigError(f"backend must be one of {_BACKENDS}, got {self.backend!r}")


def _build_section(cls, doc: dict, where: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    return cls(**doc)


def config_from_dict(doc: dict) -> CliConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    allowed = {"selector", "tracker", "detector", "vlm", "backend", "seed"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in config: {sorted(unknown)}")
    for section in ("selector", "tracker", "detector", "vlm"):
        if section in doc and not isinstance(doc[section], dict):
            raise ConfigError(f"config section {section!r} must be an object")
    return CliConfig(
        selector=_build_section(SelectorConfig, doc.get("selector", {}), "selector"),
        tracker=_build_section(TrackerConfig, doc.get("tracker", {}), "tracker"),
        detector=_build_section(DetectorSettings, doc.get("detector", {}), "detector"),
        vlm=_build_section(VlmSettings, doc.get("vlm", {}), "vlm"),
        backend=doc.get("backend", "mock"),
        seed=int(doc.get("seed", 0)),
    )


def load_config(path: str | Path | None) -> CliConfig:
    if path is None:
        return CliConfig()
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    try:
        return config_from_dict(doc)
    except TypeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None


def config_to_dict(cfg: CliConfig) -> dict:
    """Flatten the effective configuration for the result.json audit block."""
    return {
        "backend": cfg.backend,
        "seed": cfg.seed,
        "selector": {f.name: getattr(cfg.selector, f.name) for f in fields(SelectorConfig)},
        "tracker": {f.name: getattr(cfg.tracker, f.name) for f in fields(TrackerConfig)},
        "detector": {f.name: getattr(cfg.detector, f.name) for f in fields(DetectorSettings)},
        "vlm": {f.name: getattr(cfg.vlm, f.name) for f in fields(VlmSettings)},
    }
