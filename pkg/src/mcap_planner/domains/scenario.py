"""Scenario files: a rescue configuration plus a seed, stored as flat YAML."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field

from ..errors import McapError
from ..utils.config import RescueSettings
from .rescue import RescueConfig

SCENARIO_KEYS = frozenset(RescueConfig.model_fields) | {"seed"}


class Scenario(BaseModel):
    """A reproducible rescue world: configuration and master seed."""

    model_config = ConfigDict(frozen=True)

    rescue: RescueConfig = Field(default_factory=RescueConfig)
    seed: int = Field(default=0, ge=0)
    name: str = "default"

    @classmethod
    def from_mapping(cls, data: dict[str, Any], name: str = "scenario") -> Scenario:
        """
        Build a scenario from a flat mapping of RescueConfig fields and ``seed``.

        Raises:
            McapError: on keys outside the schema
            pydantic.ValidationError: on invalid values
        """
        unknown = sorted(set(data) - SCENARIO_KEYS)
        if unknown:
            raise McapError(f"{name}: unknown scenario keys: {', '.join(unknown)}")
        fields = dict(data)
        seed = fields.pop("seed", 0)
        return cls(rescue=RescueConfig(**fields), seed=seed, name=name)

    def to_mapping(self) -> dict[str, Any]:
        return {**self.rescue.model_dump(), "seed": self.seed}


def rescue_config_from_settings(settings: RescueSettings) -> RescueConfig:
    return RescueConfig(**settings.model_dump())


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read a scenario YAML file.

    Raises:
        McapError: if the file is missing, not valid YAML, not a mapping or has
            unknown keys
        pydantic.ValidationError: on invalid values
    """
    file_path = Path(path)
    try:
        with open(file_path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise McapError(f"{file_path}: cannot read scenario ({e.strerror})") from e
    except UnicodeDecodeError as e:
        raise McapError(f"{file_path}: scenario is not UTF-8 text") from e
    except yaml.YAMLError as e:
        raise McapError(f"{file_path}: invalid scenario YAML: {e}") from e
    if not isinstance(data, dict):
        raise McapError(f"{file_path}: a scenario must be a key/value mapping")
    return Scenario.from_mapping(data, name=file_path.stem)


def save_scenario(scenario: Scenario, path: Union[str, Path]) -> None:
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        yaml.safe_dump(scenario.to_mapping(), f, default_flow_style=False, sort_keys=False)
