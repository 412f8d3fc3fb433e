"""Engine configuration: one dataclass, JSON file loading, env override.

The config file is JSON. `SEMVID_CONFIG` points at an alternative path;
an explicit path argument wins over the environment.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import CorruptStore, IoFailure
from .kb import PheromoneParams

ENV_VAR = "SEMVID_CONFIG"


@dataclass(frozen=True)
class EngineConfig:
    seed: int = 0
    shot_theta: float = 0.4
    attach_threshold: float = 0.6
    map_threshold: float = 0.3
    enrich_m: int = 3
    inject_weight: float = 0.3
    eta: float = 0.1
    pheromone: PheromoneParams = field(default_factory=PheromoneParams)
    auto_reorganize_every: int = 10   # feedback events per evaporation cycle
    default_strategy: str = "hybrid"
    strategies: dict[str, tuple[float, float, float, float]] = field(
        default_factory=dict)          # overrides/extends the built-in catalog
    state_dir: str = "state"
    host: str = "127.0.0.1"
    port: int = 8765

    def __post_init__(self) -> None:
        if self.auto_reorganize_every < 1:
            raise ValueError("auto_reorganize_every must be >= 1")


def config_from_dict(doc: dict) -> EngineConfig:
    doc = dict(doc)
    if "pheromone" in doc:
        doc["pheromone"] = PheromoneParams(**doc["pheromone"])
    if "strategies" in doc:
        doc["strategies"] = {name: tuple(ws)
                             for name, ws in doc["strategies"].items()}
    return EngineConfig(**doc)


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Explicit path, else $SEMVID_CONFIG, else built-in defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path is None:
        return EngineConfig()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise IoFailure(f"config file not found: {path}") from exc
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise CorruptStore(f"bad config file {path}: {exc}") from exc
    try:
        return config_from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise CorruptStore(f"bad config fields in {path}: {exc}") from exc


def with_state_dir(config: EngineConfig, state_dir: str | Path) -> EngineConfig:
    return replace(config, state_dir=str(state_dir))
