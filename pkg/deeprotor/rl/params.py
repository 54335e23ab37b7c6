from __future__ import annotations

from dataclasses import dataclass

from deeprotor.exceptions import ConfigError


@dataclass(frozen=True)
class LearningParams:
    # tabular step size; 0 freezes the table
    alpha: float = 0.5
    gamma: float = 0.99
    batch_size: int = 32
    train_frequency: int = 4
    warmup: int = 1000
    buffer_capacity: int = 10_000
    target_sync_interval: int = 1000
    # metres per tabular-grid cell
    grid_cell: float = 1.0

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ConfigError(f"alpha {self.alpha} must lie in [0, 1]")
        if not 0 <= self.gamma < 1:
            raise ConfigError(f"gamma {self.gamma} must lie in [0, 1)")
        if min(self.batch_size, self.train_frequency, self.buffer_capacity, self.target_sync_interval) < 1:
            raise ConfigError("batch size, train frequency, buffer capacity and target sync interval must be positive")
        if self.warmup < 0:
            raise ConfigError("warmup must be non-negative")
        if self.grid_cell <= 0:
            raise ConfigError("grid cell size must be positive")


@dataclass(frozen=True)
class EpsilonSchedule:
    eps_start: float = 1.0
    eps_end: float = 0.05
    decay_steps: int = 50_000

    def __post_init__(self):
        if not (0 <= self.eps_end <= self.eps_start <= 1):
            raise ConfigError("epsilon schedule needs 0 <= eps_end <= eps_start <= 1")
        if self.decay_steps < 0:
            raise ConfigError("epsilon decay_steps must be non-negative")
