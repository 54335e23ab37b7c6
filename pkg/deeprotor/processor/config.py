from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, NamedTuple, Optional, Union

from deeprotor._typing import Algorithm
from deeprotor.env import EnvConfig
from deeprotor.exceptions import ConfigError, DeepRotorBaseException
from deeprotor.nn import DEFAULT_CONVS, Architecture, ConvSpec, LossSpec
from deeprotor.processor.parser import iter_directives, read_text_file
from deeprotor.rl.params import EpsilonSchedule, LearningParams

SEED_ENV_VAR = "DEEPROTOR_SEED"
ECHO_FILE_NAME = "config.echo"
ALGORITHMS: tuple[Algorithm, ...] = ("dqn", "ddqn", "tabular-grid")


@dataclass(frozen=True)
class NetworkConfig:
    convs: tuple[ConvSpec, ...] = DEFAULT_CONVS
    hidden: int = 256


@dataclass(frozen=True)
class OptimizerConfig:
    step_size: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon_hat: float = 1e-8
    huber_delta: float = 1.0

    @property
    def loss(self) -> LossSpec:
        return LossSpec(delta=self.huber_delta)


@dataclass(frozen=True)
class RunConfig:
    arena: str = "builtin:blocks"
    algorithm: Algorithm = "dqn"
    episodes: int = 1000
    seed: int = 0
    checkpoint_interval: int = 100
    eval_interval: int = 0
    eval_episodes: int = 5
    moving_average_window: int = 50
    env: EnvConfig = field(default_factory=EnvConfig)
    learning: LearningParams = field(default_factory=LearningParams)
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def architecture(self) -> Architecture:
        camera = self.env.camera
        return Architecture(
            convs=self.network.convs,
            hidden=self.network.hidden,
            n_actions=self.env.actions.n,
            input_shape=(camera.height, camera.width, 1),
        )


class _Kind(NamedTuple):
    parse: Callable[[list[str]], Any]
    format: Callable[[Any], str]


def _single(args: list[str]) -> str:
    if len(args) != 1:
        raise ValueError(f"expected one value, got {len(args)}")
    return args[0]


def _parse_bool(args: list[str]) -> bool:
    token = _single(args).lower()
    if token in ("true", "on", "yes", "1"):
        return True
    if token in ("false", "off", "no", "0"):
        return False
    raise ValueError(f"`{token}` is not a boolean")


def _parse_optional_float(args: list[str]) -> Optional[float]:
    token = _single(args)
    return None if token == "auto" else float(token)


def _parse_floats(args: list[str]) -> tuple[float, ...]:
    if not args:
        raise ValueError("expected at least one value")
    return tuple(float(token) for token in args)


def _parse_convs(args: list[str]) -> tuple[ConvSpec, ...]:
    if args == ["none"]:
        return ()
    specs: list[ConvSpec] = []
    for token in args:
        parts = token.split("x")
        if len(parts) != 3:
            raise ValueError(f"conv layer `{token}` must look like CHANNELSxKERNELxSTRIDE")
        specs.append(ConvSpec(*(int(part) for part in parts)))
    return tuple(specs)


def _choice(*choices: str) -> _Kind:
    def parse(args: list[str]) -> str:
        token = _single(args)
        if token not in choices:
            raise ValueError(f"`{token}` is not one of {', '.join(choices)}")
        return token

    return _Kind(parse, str)


FLOAT = _Kind(lambda args: float(_single(args)), repr)
INT = _Kind(lambda args: int(_single(args)), str)
STR = _Kind(_single, str)
BOOL = _Kind(_parse_bool, lambda value: "true" if value else "false")
OPTIONAL_FLOAT = _Kind(_parse_optional_float, lambda value: "auto" if value is None else repr(value))
FLOATS = _Kind(_parse_floats, lambda values: " ".join(repr(v) for v in values))
CONVS = _Kind(_parse_convs, lambda specs: " ".join("x".join(str(n) for n in spec) for spec in specs) or "none")

# config key -> (attribute path inside RunConfig, value kind); the order is the echo order
CONFIG_KEYS: dict[str, tuple[tuple[str, ...], _Kind]] = {
    "run.arena": (("arena",), STR),
    "run.algorithm": (("algorithm",), _choice(*ALGORITHMS)),
    "run.episodes": (("episodes",), INT),
    "run.seed": (("seed",), INT),
    "run.checkpoint_interval": (("checkpoint_interval",), INT),
    "run.eval_interval": (("eval_interval",), INT),
    "run.eval_episodes": (("eval_episodes",), INT),
    "run.moving_average_window": (("moving_average_window",), INT),
    "run.altitude": (("env", "altitude"), FLOAT),
    "run.vehicle_radius": (("env", "vehicle_radius"), FLOAT),
    "run.dt": (("env", "dt"), FLOAT),
    "run.heading_hold": (("env", "heading_hold"), BOOL),
    "run.heading_gain": (("env", "heading_gain"), FLOAT),
    "run.render_observation": (("env", "render_observation"), BOOL),
    "reward.w_progress": (("env", "reward", "w_progress"), FLOAT),
    "reward.w_deviation": (("env", "reward", "w_deviation"), FLOAT),
    "reward.w_yaw": (("env", "reward", "w_yaw"), FLOAT),
    "reward.r_goal": (("env", "reward", "r_goal"), FLOAT),
    "reward.r_collision": (("env", "reward", "r_collision"), FLOAT),
    "reward.r_checkpoint": (("env", "reward", "r_checkpoint"), FLOAT),
    "reward.deviation_limit": (("env", "reward", "deviation_limit"), FLOAT),
    "reward.away_limit": (("env", "reward", "away_limit"), OPTIONAL_FLOAT),
    "reward.mode": (("env", "reward", "mode"), _choice("line", "checkpoint")),
    "reward.goal_terminates": (("env", "reward", "goal_terminates"), BOOL),
    "budget.base_steps": (("env", "budget", "base_steps"), INT),
    "budget.steps_per_episode": (("env", "budget", "steps_per_episode"), INT),
    "budget.cap": (("env", "budget", "cap"), INT),
    "camera.width": (("env", "camera", "width"), INT),
    "camera.height": (("env", "camera", "height"), INT),
    "camera.horizontal_fov": (("env", "camera", "horizontal_fov"), FLOAT),
    "camera.max_range": (("env", "camera", "max_range"), FLOAT),
    "camera.mount_height": (("env", "camera", "mount_height"), FLOAT),
    "action.mode": (("env", "actions", "mode"), _choice("yaw-rate", "lateral-roll")),
    "action.rates": (("env", "actions", "rates"), FLOATS),
    "action.rolls": (("env", "actions", "rolls"), FLOATS),
    "action.forward_speed": (("env", "actions", "forward_speed"), FLOAT),
    "action.lateral_gain": (("env", "actions", "lateral_gain"), FLOAT),
    "noise.yaw_rate_sigma": (("env", "noise", "yaw_rate_sigma"), FLOAT),
    "noise.speed_sigma": (("env", "noise", "speed_sigma"), FLOAT),
    "noise.heading_drift_rate": (("env", "noise", "heading_drift_rate"), FLOAT),
    "attitude.k_roll": (("env", "attitude", "k_roll"), FLOAT),
    "attitude.k_pitch": (("env", "attitude", "k_pitch"), FLOAT),
    "attitude.roll_clamp": (("env", "attitude", "roll_clamp"), FLOAT),
    "learning.alpha": (("learning", "alpha"), FLOAT),
    "learning.gamma": (("learning", "gamma"), FLOAT),
    "learning.batch_size": (("learning", "batch_size"), INT),
    "learning.train_frequency": (("learning", "train_frequency"), INT),
    "learning.warmup": (("learning", "warmup"), INT),
    "learning.buffer_capacity": (("learning", "buffer_capacity"), INT),
    "learning.target_sync_interval": (("learning", "target_sync_interval"), INT),
    "learning.grid_cell": (("learning", "grid_cell"), FLOAT),
    "epsilon.start": (("epsilon", "eps_start"), FLOAT),
    "epsilon.end": (("epsilon", "eps_end"), FLOAT),
    "epsilon.decay_steps": (("epsilon", "decay_steps"), INT),
    "network.convs": (("network", "convs"), CONVS),
    "network.hidden": (("network", "hidden"), INT),
    "optimizer.step_size": (("optimizer", "step_size"), FLOAT),
    "optimizer.beta1": (("optimizer", "beta1"), FLOAT),
    "optimizer.beta2": (("optimizer", "beta2"), FLOAT),
    "optimizer.epsilon_hat": (("optimizer", "epsilon_hat"), FLOAT),
    "optimizer.huber_delta": (("optimizer", "huber_delta"), FLOAT),
}


def _apply(obj: Any, overrides: Mapping[tuple[str, ...], Any]) -> Any:
    direct = {path[0]: value for path, value in overrides.items() if len(path) == 1}
    nested: dict[str, dict[tuple[str, ...], Any]] = {}
    for path, value in overrides.items():
        if len(path) > 1:
            nested.setdefault(path[0], {})[path[1:]] = value
    for name, sub in nested.items():
        direct[name] = _apply(getattr(obj, name), sub)
    return replace(obj, **direct) if direct else obj


def _lookup(cfg: RunConfig, path: tuple[str, ...]) -> Any:
    value: Any = cfg
    for name in path:
        value = getattr(value, name)
    return value


def parse_run_config(text: str, base: Optional[RunConfig] = None) -> RunConfig:
    """Parse ``key value`` lines on top of ``base`` (defaults when omitted)"""
    overrides: dict[tuple[str, ...], Any] = {}
    seen: dict[str, int] = {}
    for directive in iter_directives(text):
        key = directive.keyword
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {directive.line_number}: unknown config key `{key}`")
        if key in seen:
            raise ConfigError(f"line {directive.line_number}: `{key}` already set on line {seen[key]}")
        seen[key] = directive.line_number
        path, kind = CONFIG_KEYS[key]
        try:
            overrides[path] = kind.parse(directive.args)
        except ValueError as e:
            raise ConfigError(f"line {directive.line_number}: invalid value for `{key}`: {e}")
    try:
        return _apply(base or RunConfig(), overrides)
    except DeepRotorBaseException as e:
        raise ConfigError(f"invalid config: {e.message}")


def load_run_config(path: Union[str, Path]) -> RunConfig:
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError(f"config file `{path}` does not exist")
    text = read_text_file(file_path, lambda message, line_number: ConfigError(f"line {line_number}: {message}"))
    return parse_run_config(text)


def echo_run_config(cfg: RunConfig) -> str:
    """Every key with its resolved value; parsing the echo gives back ``cfg``"""
    lines = ["# resolved deeprotor run config"]
    for key, (path, kind) in CONFIG_KEYS.items():
        lines.append(f"{key} {kind.format(_lookup(cfg, path))}")
    return "\n".join(lines) + "\n"


def write_config_echo(cfg: RunConfig, out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir) / ECHO_FILE_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(echo_run_config(cfg), encoding="utf-8")
    return path


def seed_override(cli_seed: Optional[int] = None, environ: Optional[Mapping[str, str]] = None) -> Optional[int]:
    """``--seed`` beats ``DEEPROTOR_SEED``; None leaves the configured seed alone"""
    if cli_seed is not None:
        return cli_seed
    env = os.environ if environ is None else environ
    raw = env.get(SEED_ENV_VAR)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR}={raw!r} is not an integer")


def resolve_seed(
    cfg: RunConfig, cli_seed: Optional[int] = None, environ: Optional[Mapping[str, str]] = None
) -> RunConfig:
    seed = seed_override(cli_seed, environ)
    return cfg if seed is None else replace(cfg, seed=seed)
