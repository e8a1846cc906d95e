"""
Configuration management using Pydantic settings.
"""
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional
from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
import yaml

from ..protocol.node import Trigger, VoteSource


class Mode(str, Enum):
    """Which protocol a trial runs."""
    AVG_DEGREE = "avg-degree"
    SIZE_SEQ = "size-seq"
    SIZE_PAR_ORACLE = "size-par-oracle"
    SIZE_PAR_CORRECTION = "size-par-correction"
    SIZE_ANONYMOUS = "size-anonymous"
    LEADER_ELECTION = "leader-election"
    AVERAGE = "average"

    @property
    def is_size(self) -> bool:
        return self in SIZE_MODES


SIZE_MODES = frozenset({
    Mode.SIZE_SEQ,
    Mode.SIZE_PAR_ORACLE,
    Mode.SIZE_PAR_CORRECTION,
    Mode.SIZE_ANONYMOUS,
})


class SimConfig(BaseSettings):
    """Simulation configuration for a single trial or a sweep."""
    model_config = SettingsConfigDict(env_prefix="QCOUNT_SIM_")

    mode: Mode = Mode.AVG_DEGREE

    # Graph source
    n: int = Field(20, ge=2)
    edge_prob: float = Field(0.5, gt=0.0, le=1.0)
    graph_file: Optional[str] = None
    target_diameter: Optional[int] = Field(None, ge=1)
    max_resamples: int = Field(10000, ge=1)

    # Protocol parameters
    d_prime: int = Field(4, ge=1)
    d_prime_auto: bool = False
    u_v: int = Field(20, ge=1)
    eta_max: int = Field(255, ge=1)
    eta_max_overrides: Dict[int, int] = Field(default_factory=dict)
    trigger: Trigger = Trigger.GEQ1
    vote: VoteSource = VoteSource.RATIO
    fixed_leader: Optional[int] = Field(None, ge=0)
    initial_values: Optional[List[int]] = None

    # Run control
    master_seed: int = Field(1, ge=0, lt=2**64)
    max_steps: Optional[int] = Field(None, ge=1)
    trials: int = Field(1, ge=1)
    capture_trace: bool = False
    capture_states: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> "SimConfig":
        if self.max_steps is not None and self.max_steps <= self.u_v * self.d_prime:
            raise ValueError(
                f"max_steps ({self.max_steps}) must exceed u_v * d_prime ({self.u_v * self.d_prime})"
            )
        if self.mode == Mode.AVERAGE and not self.initial_values:
            raise ValueError("mode 'average' needs initial_values")
        for node, value in self.eta_max_overrides.items():
            if value < 1:
                raise ValueError(f"eta_max override for node {node} must be >= 1")
        return self

    def resolved_max_steps(self, n: int) -> int:
        """Step budget, defaulting to 100 * n * d_prime."""
        if self.max_steps is not None:
            return self.max_steps
        return max(100 * n * self.d_prime, self.u_v * self.d_prime + 1)

    def eta_max_for(self, node: int) -> int:
        """Largest election draw for a node (per-node override or the network value)."""
        return self.eta_max_overrides.get(node, self.eta_max)


class SweepConfig(BaseSettings):
    """Multi-trial sweep configuration."""
    model_config = SettingsConfigDict(env_prefix="QCOUNT_SWEEP_")

    workers: int = Field(1, ge=1)
    bin_width: int = Field(10, ge=1)
    allow_failures: bool = False


class LoggingConfig(BaseSettings):
    """Logging configuration."""
    model_config = SettingsConfigDict(env_prefix="QCOUNT_LOG_")

    level: str = "INFO"
    file: str = "logs/qcount.log"
    rotation: str = "10 MB"
    retention: str = "7 days"


class Config(BaseSettings):
    """Main application configuration."""
    simulation: SimConfig = Field(default_factory=SimConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @classmethod
    def load_from_yaml(cls, config_path: str = "config/config.yaml") -> "Config":
        """Load configuration from YAML file."""
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}

        return cls(
            simulation=SimConfig(**(data.get("simulation") or {})),
            sweep=SweepConfig(**(data.get("sweep") or {})),
            logging=LoggingConfig(**(data.get("logging") or {})),
        )
