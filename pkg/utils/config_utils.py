"""
Configuration management: YAML profiles, variable references and the
pydantic settings models of the detector.

configs/base.yaml holds every default; a named profile (configs/<name>.yaml)
is deep-merged over it. ${VAR} and ${VAR:-default} are resolved against
top-level keys first, then the environment (.env is loaded when present).
"""

import os
import re
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field

from core.feature_memory import CountClassifierConfig
from core.frame_model import CalibrationConfig
from core.linguistic_attributes import ContrastConfig
from core.pipeline import PipelineConfig
from core.zone_detection import MovementConfig, ThresholdConfig

try:
    from dotenv import load_dotenv

    DOTENV_AVAILABLE = True
except ImportError:
    DOTENV_AVAILABLE = False

_VAR_PATTERN = re.compile(r"^\$\{([A-Za-z_][A-Za-z0-9_]*)(?::-(.*))?\}$")


class DotDict(dict):
    """Dictionary with attribute access, applied recursively."""

    def __init__(self, *args, **kwargs):
        super(DotDict, self).__init__(*args, **kwargs)
        for key, value in self.items():
            if isinstance(value, dict):
                self[key] = DotDict(value)
            elif isinstance(value, list):
                self[key] = [
                    DotDict(item) if isinstance(item, dict) else item for item in value
                ]

    def __getattr__(self, key):
        try:
            return self[key]
        except KeyError:
            raise AttributeError(f"'DotDict' object has no attribute '{key}'")

    def __setattr__(self, key, value):
        self[key] = value


class LogServiceConfig(BaseModel):
    """Log sink settings consumed by LogUtils."""

    model_config = ConfigDict(frozen=True)

    directory: str = Field("logs", description="Directory of the rotating log file")
    console_output: bool = Field(True, description="Echo messages to stderr")
    console_level: str = Field("INFO", description="Minimum console level")
    file_output: bool = Field(True, description="Write logs/vloop.log")
    max_file_size_mb: int = Field(10, ge=1)
    backup_count: int = Field(5, ge=0)


class BenchmarkConfig(BaseModel):
    """Defaults of the throughput benchmark."""

    model_config = ConfigDict(frozen=True)

    frames: int = Field(500, ge=1)
    width: int = Field(768, ge=7)
    height: int = Field(512, ge=7)
    zone_size: int = Field(64, ge=3)
    zone_count: int = Field(4, ge=1)
    target_fps: float = Field(25.0, gt=0)
    seed: int = Field(2010)


class DetectorSettings(BaseModel):
    """All detector settings, one model per module."""

    model_config = ConfigDict(extra="allow")

    calibration: CalibrationConfig = Field(default_factory=CalibrationConfig)
    contrast: ContrastConfig = Field(default_factory=ContrastConfig)
    count_classifier: CountClassifierConfig = Field(default_factory=CountClassifierConfig)
    thresholds: ThresholdConfig = Field(default_factory=ThresholdConfig)
    movement: MovementConfig = Field(default_factory=MovementConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    log_service: LogServiceConfig = Field(default_factory=LogServiceConfig)
    benchmark: BenchmarkConfig = Field(default_factory=BenchmarkConfig)

    def with_calibration_interval(self, interval: Optional[int]) -> "DetectorSettings":
        if interval is None:
            return self
        calibration = self.calibration.model_copy(update={"interval": int(interval)})
        return self.model_copy(update={"calibration": CalibrationConfig(**calibration.model_dump())})


class RunConfig(BaseModel):
    """Per-invocation settings of a detection or benchmark run."""

    input: Optional[str] = Field(None, description="PGM pattern/directory or raw:path:WxH")
    zones: Optional[str] = Field(None, description="Zone file (JSON)")
    out: Optional[str] = Field(None, description="Output CSV path")
    calib_interval: Optional[int] = Field(None, ge=1, description="Override of calibration.interval")
    overlay_dir: Optional[str] = Field(None, description="Directory for debug overlays")
    snapshot_dir: Optional[str] = Field(None, description="Directory for accumulator snapshots")
    benchmark: bool = Field(False, description="Instrumented benchmark run")
    settings: DetectorSettings = Field(default_factory=DetectorSettings)


class Config:
    """Configuration loader with profile overlays and variable references."""

    def __init__(self, config_name: Optional[str] = None, cfg_dir: Optional[Path] = None):
        self._cfg_dir = Path(cfg_dir) if cfg_dir else Path(__file__).resolve().parent.parent / "configs"
        self._settings: Optional[DetectorSettings] = None
        self._config_name = config_name or os.getenv("CONFIG_ENV")

        # Load .env file if available
        if DOTENV_AVAILABLE:
            env_file = Path(__file__).resolve().parent.parent / ".env"
            if env_file.exists():
                load_dotenv(env_file)

    def _load_yaml(self, path: Path) -> Dict[str, Any]:
        """Load a yaml file; a missing file is an empty mapping"""
        if not path.exists():
            return {}
        return yaml.safe_load(path.read_text()) or {}

    def _merge_configs(self, base: dict, overlay: dict) -> dict:
        """Deep-merge overlay into base"""
        result = dict(base)
        for key, value in overlay.items():
            if isinstance(value, dict) and isinstance(result.get(key), dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value
        return result

    def _resolve_variables(self, config: dict, root: Optional[dict] = None) -> dict:
        """Resolve ${var} and ${var:-default}: top-level keys first, then environment"""
        root = config if root is None else root

        def resolve_value(value):
            if isinstance(value, dict):
                return self._resolve_variables(value, root)
            elif isinstance(value, list):
                return [resolve_value(item) for item in value]
            elif isinstance(value, str):
                match = _VAR_PATTERN.match(value)
                if not match:
                    return value
                var_name, default = match.group(1), match.group(2)
                resolved = root.get(var_name)
                if resolved is None:
                    resolved = os.getenv(var_name)
                if resolved is None:
                    resolved = default
                return resolved if resolved is not None else value
            return value

        return {k: resolve_value(v) for k, v in config.items()}

    def raw(self) -> DotDict:
        """Merged and resolved mapping before validation"""
        base_config = self._load_yaml(self._cfg_dir / "base.yaml")
        if self._config_name:
            profile = self._cfg_dir / f"{self._config_name}.yaml"
            if not profile.exists():
                raise FileNotFoundError(f"config profile not found: {profile}")
            merged = self._merge_configs(base_config, self._load_yaml(profile))
        else:
            merged = base_config
        return DotDict(self._resolve_variables(merged))

    @property
    def settings(self) -> DetectorSettings:
        """Validated settings (cached)"""
        if self._settings is None:
            self._settings = DetectorSettings(**self.raw())
        return self._settings
