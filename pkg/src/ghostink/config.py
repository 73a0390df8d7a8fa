"""Run configuration.

One JSON file configures a whole run: analyzer thresholds, render-diff
constants, backend routing, and token pricing. Secrets never appear in
the file; the backend section names the environment variable that holds
the API key and nothing more. A config that tries to embed a key is
rejected outright.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ghostink.backend import BackendConfig
from ghostink.stage1 import AnalyzerThresholds
from ghostink.vda import VdaConfig

_SECRET_KEYS = ("api_key", "apikey", "secret", "token", "password")


@dataclass(slots=True)
class RunConfig:
    thresholds: AnalyzerThresholds = field(default_factory=AnalyzerThresholds)
    vda: VdaConfig = field(default_factory=VdaConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)
    dpi: int = 150
    seed: int = 0
    price_prompt_per_1k: float = 0.0
    price_completion_per_1k: float = 0.0

    def to_dict(self) -> dict:
        return {
            "thresholds": asdict(self.thresholds),
            "vda": asdict(self.vda),
            "backend": asdict(self.backend),
            "dpi": self.dpi,
            "seed": self.seed,
            "price_prompt_per_1k": self.price_prompt_per_1k,
            "price_completion_per_1k": self.price_completion_per_1k,
        }

    def digest(self) -> str:
        """Stable hash of the full configuration, for report headers."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _build_section(cls, raw: dict, where: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(raw) - allowed
    if unknown:
        raise ValueError(
            f"unknown {where} option(s): {', '.join(sorted(unknown))}"
        )
    return cls(**raw)


def load_config(path: str | Path) -> RunConfig:
    """Parse a JSON config file, rejecting unknown keys and embedded
    secrets."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config root must be a JSON object")
    for section in ("thresholds", "vda", "backend"):
        if section in raw and not isinstance(raw[section], dict):
            raise ValueError(f"config section {section!r} must be a JSON object")

    def _scan_for_secrets(node) -> None:
        if isinstance(node, dict):
            for key, value in node.items():
                if str(key).lower().replace("-", "_") in _SECRET_KEYS:
                    raise ValueError(
                        "config files must not contain credentials; set the "
                        "environment variable named by backend.api_key_env "
                        "instead"
                    )
                _scan_for_secrets(value)
        elif isinstance(node, list):
            for value in node:
                _scan_for_secrets(value)

    _scan_for_secrets(raw)

    known = {
        "thresholds", "vda", "backend", "dpi", "seed",
        "price_prompt_per_1k", "price_completion_per_1k",
    }
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config option(s): {', '.join(sorted(unknown))}")

    config = RunConfig()
    if "thresholds" in raw:
        config.thresholds = _build_section(
            AnalyzerThresholds, raw["thresholds"], "thresholds"
        )
    if "vda" in raw:
        config.vda = _build_section(VdaConfig, raw["vda"], "vda")
    if "backend" in raw:
        config.backend = _build_section(BackendConfig, raw["backend"], "backend")
    for scalar in ("dpi", "seed", "price_prompt_per_1k", "price_completion_per_1k"):
        if scalar in raw:
            setattr(config, scalar, raw[scalar])
    if config.dpi <= 0:
        raise ValueError("dpi must be positive")
    return config
