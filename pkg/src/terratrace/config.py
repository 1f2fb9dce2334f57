"""Service configuration: JSON file with environment-variable overrides for
the LLM endpoint and credential (never stored in config files)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from terratrace.classify import ClassifierParams
from terratrace.fires import DEFAULT_RADIUS_KM
from terratrace.llm import DEFAULT_MODEL


@dataclass
class LlmConfig:
    kind: str = "mock"  # mock | remote
    endpoint: str | None = None
    model: str = DEFAULT_MODEL

    @classmethod
    def from_dict(cls, d: dict) -> "LlmConfig":
        return cls(kind=d.get("kind", "mock"), endpoint=d.get("endpoint"),
                   model=d.get("model", DEFAULT_MODEL))


@dataclass
class ServiceConfig:
    store_dir: str = "store"
    port: int = 8000
    classifier_params: ClassifierParams = field(default_factory=ClassifierParams)
    llm: LlmConfig = field(default_factory=LlmConfig)
    fire_csv: str | None = None
    fire_radius_km: float = DEFAULT_RADIUS_KM

    @classmethod
    def from_dict(cls, d: dict) -> "ServiceConfig":
        return cls(
            store_dir=d.get("store_dir", "store"),
            port=int(d.get("port", 8000)),
            classifier_params=ClassifierParams.from_dict(d.get("classifier_params", {})),
            llm=LlmConfig.from_dict(d.get("llm", {})),
            fire_csv=d.get("fire_csv"),
            fire_radius_km=float(d.get("fire_radius_km", DEFAULT_RADIUS_KM)),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ServiceConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))
