"""Configuration management for the MCAP planner."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..errors import McapError


class SearchSettings(BaseSettings):
    """Search parameters used when a command does not override them."""

    budget: int = 1000
    h_max: int = 40
    gamma: float = 0.9
    c: float = 10.0
    normalized_weights: bool = False
    discounted_backup: bool = False
    transparent_termination: bool = False


class RescueSettings(BaseSettings):
    """Rescue world parameters."""

    positions: int = 20
    connectivity: float = 0.30
    safe_count: int = 3
    victims: int = 10
    fires: int = 10
    capacity: int = 2
    p_action_fail: float = 0.05
    p_spontaneous_ignite: float = 0.01
    p_spread_factor: float = 0.30
    p_cease: float = 0.05
    extinguish_own_position: bool = False
    event_min_fires: int = 10


class ExperimentSettings(BaseSettings):
    """Experiment harness settings."""

    horizon: int = 50
    episodes: int = 100
    min_episodes: int = 10
    ci: float = 0.1  # total width of the confidence interval
    confidence: float = 0.95
    workers: int = 1
    seed: int = 0
    event_steps: list[int] = Field(default=[20, 40])
    reward_switch_step: int = 25
    output_dir: str = "./results"


class LoggingSettings(BaseSettings):
    """Logging configuration."""

    level: str = "INFO"
    format: str = (
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{extra[component]}</cyan> | "
        "<level>{message}</level>"
    )
    file_path: Optional[str] = None
    rotation: str = "10 MB"
    retention: str = "7 days"


class Settings(BaseSettings):
    """Main settings for the MCAP planner."""

    model_config = SettingsConfigDict(
        env_prefix="MCAP_",
        env_nested_delimiter="__",
        extra="ignore",
    )

    search: SearchSettings = Field(default_factory=SearchSettings)
    rescue: RescueSettings = Field(default_factory=RescueSettings)
    experiment: ExperimentSettings = Field(default_factory=ExperimentSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    @classmethod
    def from_yaml(cls, path: Path) -> Settings:
        """
        Load settings from a YAML file; a missing file gives the defaults.

        Raises:
            McapError: if the file is not valid YAML or not a mapping
        """
        if not path.exists():
            return cls()
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as e:
            raise McapError(f"{path}: invalid YAML ({e})") from e
        if not isinstance(data, dict):
            raise McapError(f"{path}: configuration must be a mapping of sections")
        return cls(**data)


CONFIG_ENV_VAR = "MCAP_CONFIG"


def config_search_paths() -> list[Path]:
    """Locations tried, in order, when no configuration file is given."""
    return [
        Path("config.yaml"),
        Path("config/config.yaml"),
        Path.home() / ".mcap" / "config.yaml",
    ]


def load_config(config_path: Optional[str] = None) -> Settings:
    """
    Load settings from ``config_path``, ``$MCAP_CONFIG`` or the search paths.

    Raises:
        McapError: if an explicitly named file does not exist
    """
    explicit = config_path or os.environ.get(CONFIG_ENV_VAR)
    if explicit:
        path = Path(explicit)
        if not path.exists():
            raise McapError(f"configuration file not found: {path}")
        return Settings.from_yaml(path)

    found = next((p for p in config_search_paths() if p.exists()), None)
    return Settings.from_yaml(found) if found else Settings()


def create_default_config(path: Path) -> None:
    """Write the default settings (minus the console log format) as YAML."""
    sections: dict[str, Any] = Settings().model_dump()
    sections["logging"].pop("format")

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("# MCAP planner settings; MCAP_<SECTION>__<KEY> variables override them.\n")
        yaml.safe_dump(sections, f, default_flow_style=False, sort_keys=False)
