from __future__ import annotations

import math
import time
from collections import Counter, deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from deeprotor._typing import TERMINAL_REASONS, FloatArray, MetricsRow, TerminalReason
from deeprotor.env import EnvConfig, EpisodeResult, NavigationEnv
from deeprotor.exceptions import CheckpointFormatError, ConfigError, NonFiniteLossError
from deeprotor.nn import (
    OptimizerState,
    QNetwork,
    TrainingBatch,
    decode_records,
    encode_records,
    load_checkpoint,
    network_tensors,
    prefixed,
    read_checkpoint_file,
    restore_network,
    save_checkpoint,
    train_step,
    write_checkpoint_file,
)
from deeprotor.processor.config import RunConfig, echo_run_config, parse_run_config, write_config_echo
from deeprotor.processor.metrics import MetricsWriter, MovingAverage
from deeprotor.processor.progressbar import show_training_progress
from deeprotor.rl.policy import epsilon_at, select_action
from deeprotor.rl.replay import ReplayBuffer, Transition
from deeprotor.rl.tabular import QTable, tabular_q_update
from deeprotor.rl.targets import double_dqn_targets, dqn_targets
from deeprotor.sensor import ObservationTensor
from deeprotor.utils.console.formatter import duration_format
from deeprotor.utils.console.logger import CHECKPOINT_BADGE, EPISODE_BADGE, EVAL_BADGE, Logger
from deeprotor.vehicle import normalize_yaw
from deeprotor.world import (
    WOBBLES_ZONES,
    Arena,
    build_wobbles_zone,
    is_random_zone_source,
    load_arena_source,
)

METRICS_FILE_NAME = "metrics.csv"
EVAL_METRICS_FILE_NAME = "eval_metrics.csv"
CHECKPOINT_DIR_NAME = "checkpoints"
LAST_CHECKPOINT_NAME = "last.ckpt"
FINAL_WINDOW = 100
HEADING_SECTORS = 8
_RNG_STREAMS = ("env", "agent", "init", "arena")
# SeedSequence entropy tags of the evaluation streams
_EVAL_STREAM = 1
_PERIODIC_EVAL_STREAM = 2

StateKey = Union[FloatArray, int]


def spawn_rngs(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(_RNG_STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(_RNG_STREAMS, children)}


class ArenaSchedule:
    """Arena (and env config) of every episode

    ``builtin:wobbles`` draws one of the four zones per episode; zones carrying route checkpoints
    are trained with checkpoint rewards.
    """

    def __init__(self, cfg: RunConfig, rng: np.random.Generator):
        # the tabular agent observes its discretised pose, not the camera
        self.env_config = cfg.env if cfg.algorithm != "tabular-grid" else replace(cfg.env, render_observation=False)
        self.rng = rng
        self.zones: dict[str, Arena] = {}
        self.fixed: Optional[Arena] = None
        if is_random_zone_source(cfg.arena):
            self.zones = {zone: build_wobbles_zone(zone, cfg.seed) for zone in WOBBLES_ZONES}
        else:
            self.fixed = load_arena_source(cfg.arena, cfg.seed, cfg.env.vehicle_radius, cfg.env.altitude)

    @property
    def is_random(self) -> bool:
        return self.fixed is None

    def first(self) -> Arena:
        return self.fixed if self.fixed is not None else self.zones[WOBBLES_ZONES[0]]

    def next(self) -> tuple[Arena, EnvConfig]:
        if self.fixed is not None:
            return self.fixed, self.env_config
        arena = self.zones[WOBBLES_ZONES[int(self.rng.integers(len(WOBBLES_ZONES)))]]
        if arena.checkpoints:
            return arena, replace(self.env_config, reward=replace(self.env_config.reward, mode="checkpoint"))
        return arena, self.env_config


def grid_state_index(env: NavigationEnv, cell: float) -> int:
    """Grid cell of ``cell`` metres times one of eight 45 degree heading sectors"""
    bounds = env.arena.bounds
    nx = max(1, math.ceil(bounds.width / cell))
    ny = max(1, math.ceil(bounds.height / cell))
    ix = min(max(int((env.state.x - bounds.xmin) // cell), 0), nx - 1)
    iy = min(max(int((env.state.y - bounds.ymin) // cell), 0), ny - 1)
    sector = int(normalize_yaw(env.state.yaw + 180.0 / HEADING_SECTORS) // (360.0 / HEADING_SECTORS))
    return (iy * nx + ix) * HEADING_SECTORS + sector % HEADING_SECTORS


def grid_state_count(arena: Arena, cell: float) -> int:
    nx = max(1, math.ceil(arena.bounds.width / cell))
    ny = max(1, math.ceil(arena.bounds.height / cell))
    return nx * ny * HEADING_SECTORS


class Agent:
    """Acting and learning interface shared by the three algorithms"""

    algorithm = ""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def state_key(self, obs: ObservationTensor, env: NavigationEnv) -> StateKey:
        return obs.data

    def qvalues(self, key: StateKey) -> FloatArray:
        raise NotImplementedError

    def observe(
        self,
        key: StateKey,
        a: int,
        r: float,
        next_key: StateKey,
        done: bool,
        global_step: int,
        rng: np.random.Generator,
    ) -> Optional[float]:
        """Record one transition, maybe learn; returns the training loss when a train step ran"""
        raise NotImplementedError

    def snapshot(self) -> Agent:
        """Frozen copy for evaluation; never learns"""
        raise NotImplementedError

    def encode(self, metadata: dict[str, Any]) -> bytes:
        raise NotImplementedError


class _ReplayAgent(Agent):
    def __init__(self, cfg: RunConfig, buffer: Optional[ReplayBuffer] = None):
        super().__init__(cfg)
        self.buffer = buffer if buffer is not None else ReplayBuffer(cfg.learning.buffer_capacity)

    def learn(self, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def after_step(self, global_step: int):
        pass

    def observe(
        self,
        key: StateKey,
        a: int,
        r: float,
        next_key: StateKey,
        done: bool,
        global_step: int,
        rng: np.random.Generator,
    ) -> Optional[float]:
        assert not isinstance(key, int) and not isinstance(next_key, int)
        self.buffer.push(Transition(key, a, r, next_key, done))
        loss: Optional[float] = None
        learning = self.cfg.learning
        warm = len(self.buffer) >= max(learning.warmup, learning.batch_size)
        if warm and global_step % learning.train_frequency == 0:
            loss = self.learn(rng)
        self.after_step(global_step)
        return loss

    def _replay_payload(self) -> tuple[dict[str, Any], dict[str, FloatArray]]:
        replay_metadata, replay_tensors = self.buffer.state_dict()
        return {"replay": replay_metadata}, replay_tensors


def _new_optimizer(cfg: RunConfig, net: QNetwork) -> OptimizerState:
    o = cfg.optimizer
    return OptimizerState.for_network(net, o.step_size, o.beta1, o.beta2, o.epsilon_hat)


class DQNAgent(_ReplayAgent):
    """Online network trained towards a periodically synchronised target network"""

    algorithm = "dqn"

    def __init__(
        self,
        cfg: RunConfig,
        online: QNetwork,
        target: QNetwork,
        opt: OptimizerState,
        buffer: Optional[ReplayBuffer] = None,
    ):
        super().__init__(cfg, buffer)
        self.online = online
        self.target = target
        self.opt = opt

    @classmethod
    def create(cls, cfg: RunConfig, init_rng: np.random.Generator) -> DQNAgent:
        online = QNetwork.initialize(cfg.architecture(), init_rng)
        return cls(cfg, online, online.copy(), _new_optimizer(cfg, online))

    def qvalues(self, key: StateKey) -> FloatArray:
        return self.online.forward(key)

    def learn(self, rng: np.random.Generator) -> float:
        batch = self.buffer.sample(self.cfg.learning.batch_size, rng)
        targets = dqn_targets(batch, self.target, self.cfg.learning.gamma)
        return train_step(
            self.online, self.opt, TrainingBatch(batch.observations, batch.actions, targets), self.cfg.optimizer.loss
        )

    def after_step(self, global_step: int):
        if global_step % self.cfg.learning.target_sync_interval == 0:
            self.target.copy_from(self.online)

    def snapshot(self) -> Agent:
        online = self.online.copy()
        return DQNAgent(self.cfg, online, online, self.opt, ReplayBuffer(1))

    def encode(self, metadata: dict[str, Any]) -> bytes:
        agent_metadata, tensors = self._replay_payload()
        tensors.update(network_tensors(self.target, "target/"))
        return save_checkpoint(self.online, self.opt, {**metadata, **agent_metadata}, tensors)


class DoubleDQNAgent(_ReplayAgent):
    """Two online networks; a fair coin picks the one updated at each train step"""

    algorithm = "ddqn"

    def __init__(
        self,
        cfg: RunConfig,
        q1: QNetwork,
        q2: QNetwork,
        opt1: OptimizerState,
        opt2: OptimizerState,
        buffer: Optional[ReplayBuffer] = None,
    ):
        super().__init__(cfg, buffer)
        self.q1, self.q2 = q1, q2
        self.opt1, self.opt2 = opt1, opt2

    @classmethod
    def create(cls, cfg: RunConfig, init_rng: np.random.Generator) -> DoubleDQNAgent:
        arch = cfg.architecture()
        q1 = QNetwork.initialize(arch, init_rng)
        q2 = QNetwork.initialize(arch, init_rng)
        return cls(cfg, q1, q2, _new_optimizer(cfg, q1), _new_optimizer(cfg, q2))

    def qvalues(self, key: StateKey) -> FloatArray:
        return self.q1.forward(key) + self.q2.forward(key)

    def learn(self, rng: np.random.Generator) -> float:
        batch = self.buffer.sample(self.cfg.learning.batch_size, rng)
        coin = bool(rng.random() < 0.5)
        which, targets = double_dqn_targets(batch, self.q1, self.q2, self.cfg.learning.gamma, coin)
        net, opt = (self.q1, self.opt1) if which == "q1" else (self.q2, self.opt2)
        return train_step(net, opt, TrainingBatch(batch.observations, batch.actions, targets), self.cfg.optimizer.loss)

    def snapshot(self) -> Agent:
        return DoubleDQNAgent(self.cfg, self.q1.copy(), self.q2.copy(), self.opt1, self.opt2, ReplayBuffer(1))

    def encode(self, metadata: dict[str, Any]) -> bytes:
        agent_metadata, tensors = self._replay_payload()
        tensors.update(network_tensors(self.q2, "q2/"))
        tensors.update(prefixed(self.opt2.first_moment, "q2.adam.m/"))
        tensors.update(prefixed(self.opt2.second_moment, "q2.adam.v/"))
        agent_metadata["q2_optimizer_step"] = self.opt2.step
        return save_checkpoint(self.q1, self.opt1, {**metadata, **agent_metadata}, tensors)


class TabularGridAgent(Agent):
    """Tabular Q-learning over (grid cell, heading sector) states, updated after every step"""

    algorithm = "tabular-grid"

    def __init__(self, cfg: RunConfig, table: QTable):
        super().__init__(cfg)
        self.table = table

    @classmethod
    def create(cls, cfg: RunConfig, arena: Arena) -> TabularGridAgent:
        return cls(cfg, QTable(grid_state_count(arena, cfg.learning.grid_cell), cfg.env.actions.n))

    def state_key(self, obs: ObservationTensor, env: NavigationEnv) -> StateKey:
        return grid_state_index(env, self.cfg.learning.grid_cell)

    def qvalues(self, key: StateKey) -> FloatArray:
        return self.table.values[int(key)]

    def observe(
        self,
        key: StateKey,
        a: int,
        r: float,
        next_key: StateKey,
        done: bool,
        global_step: int,
        rng: np.random.Generator,
    ) -> Optional[float]:
        tabular_q_update(self.table, int(key), a, r, int(next_key), done, self.cfg.learning)
        return None

    def snapshot(self) -> Agent:
        return TabularGridAgent(self.cfg, QTable(self.table.n_states, self.table.n_actions, self.table.values.copy()))

    def encode(self, metadata: dict[str, Any]) -> bytes:
        # float64 values travel in the metadata
        return encode_records({**metadata, "q_table": self.table.values.tolist()}, {})


def create_agent(cfg: RunConfig, init_rng: np.random.Generator, arena: Arena) -> Agent:
    if cfg.algorithm == "dqn":
        return DQNAgent.create(cfg, init_rng)
    if cfg.algorithm == "ddqn":
        return DoubleDQNAgent.create(cfg, init_rng)
    return TabularGridAgent.create(cfg, arena)


def restore_agent(cfg: RunConfig, data: bytes) -> tuple[Agent, dict[str, Any]]:
    """Rebuild the agent stored in a checkpoint, checked against ``cfg``"""
    metadata, tensors = decode_records(data)
    algorithm = metadata.get("algorithm")
    if algorithm != cfg.algorithm:
        raise ConfigError(f"checkpoint was trained with `{algorithm}`, config asks for `{cfg.algorithm}`")
    if algorithm == "tabular-grid":
        values = np.array(metadata["q_table"], dtype=np.float64)
        return TabularGridAgent(cfg, QTable(values.shape[0], values.shape[1], values)), metadata
    checkpoint = load_checkpoint(data, expected=cfg.architecture())
    buffer = ReplayBuffer.from_state_dict(metadata["replay"], checkpoint.extra) if "replay" in metadata else None
    if algorithm == "dqn":
        target = restore_network(checkpoint.net.arch, tensors, "target/")
        return DQNAgent(cfg, checkpoint.net, target, checkpoint.opt, buffer), metadata
    q2 = restore_network(checkpoint.net.arch, tensors, "q2/")
    opt2 = replace(
        checkpoint.opt,
        first_moment={k[len("q2.adam.m/") :]: v.copy() for k, v in tensors.items() if k.startswith("q2.adam.m/")},
        second_moment={k[len("q2.adam.v/") :]: v.copy() for k, v in tensors.items() if k.startswith("q2.adam.v/")},
        step=int(metadata["q2_optimizer_step"]),
    )
    opt2.check_congruent(q2)
    return DoubleDQNAgent(cfg, checkpoint.net, q2, checkpoint.opt, opt2, buffer), metadata


@dataclass
class TrainingReport:
    episodes: int
    terminal_counts: dict[str, int]
    best_moving_average: Optional[float]
    # over the last (up to) 100 episodes
    final_goal_rate: float
    final_collision_rate: float
    wall_time: float
    metrics_path: Path
    last_checkpoint: Optional[Path]


@dataclass
class EvalReport:
    episodes: int
    terminal_counts: dict[str, int]
    goal_rate: float
    mean_reward: float
    metrics_path: Path


def metrics_row(
    episode: int, result: EpisodeResult, moving_avg: float, epsilon: float, cumulative_collisions: int
) -> MetricsRow:
    return MetricsRow(
        episode=episode,
        steps=result.steps,
        total_reward=result.total_reward,
        moving_avg_reward=moving_avg,
        terminal_reason=result.terminal,
        epsilon=epsilon,
        mean_abs_yaw_rate=result.mean_abs_yaw_rate,
        mean_roll=result.mean_roll,
        mean_pitch=result.mean_pitch,
        checkpoints_hit=result.checkpoints_hit,
        cumulative_collisions=cumulative_collisions,
    )


def learns_from(terminal: Optional[TerminalReason]) -> bool:
    """Whether a transition ends the task (no bootstrap); running out of steps does not"""
    return terminal is not None and terminal != "step_limit"


def play_episode(
    agent: Agent,
    env: NavigationEnv,
    episode: int,
    arena: Arena,
    epsilon: float,
    rng: np.random.Generator,
) -> EpisodeResult:
    """One episode with a fixed exploration rate and no learning"""
    obs = env.reset(episode, arena)
    done = False
    while not done:
        action = select_action(agent.qvalues(agent.state_key(obs, env)), epsilon, rng)
        obs, _, done, _ = env.step(action)
    return env.result()


class Trainer:
    def __init__(self, cfg: RunConfig, out_dir: Union[str, Path], resume: Optional[Union[str, Path]] = None):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.rngs = spawn_rngs(cfg.seed)
        self.schedule = ArenaSchedule(cfg, self.rngs["arena"])
        if cfg.algorithm == "tabular-grid" and self.schedule.is_random:
            raise ConfigError("tabular-grid needs a single arena")
        self.episode = 0
        self.global_step = 0
        self.moving = MovingAverage(cfg.moving_average_window)
        self.cumulative_collisions = 0
        self.recent_terminals: deque[str] = deque(maxlen=FINAL_WINDOW)
        self.terminal_counts: Counter[str] = Counter()
        self.best_moving_average: Optional[float] = None
        self.last_checkpoint: Optional[Path] = None
        if resume is not None:
            self.agent = self._restore(Path(resume))
        else:
            self.agent = create_agent(cfg, self.rngs["init"], self.schedule.first())

    def _restore(self, path: Path) -> Agent:
        agent, metadata = restore_agent(self.cfg, read_checkpoint_file(path))
        try:
            self.episode = int(metadata["episode"])
            self.global_step = int(metadata["global_step"])
            for name, state in metadata["rng"].items():
                self.rngs[name].bit_generator.state = state
            self.moving = MovingAverage(self.cfg.moving_average_window, metadata["moving_window"])
            self.cumulative_collisions = int(metadata["cumulative_collisions"])
            self.recent_terminals.extend(metadata["recent_terminals"])
            self.terminal_counts.update(metadata["terminal_counts"])
            self.best_moving_average = metadata["best_moving_average"]
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointFormatError(f"checkpoint `{path}` lacks trainer state: {e}")
        Logger.custom(f"resumed from {path} at episode {self.episode}, step {self.global_step}", CHECKPOINT_BADGE)
        return agent

    def _checkpoint_metadata(self) -> dict[str, Any]:
        return {
            "algorithm": self.cfg.algorithm,
            "config": echo_run_config(self.cfg),
            "episode": self.episode,
            "global_step": self.global_step,
            "rng": {name: self.rngs[name].bit_generator.state for name in ("env", "agent", "arena")},
            "moving_window": self.moving.values,
            "cumulative_collisions": self.cumulative_collisions,
            "recent_terminals": list(self.recent_terminals),
            "terminal_counts": dict(self.terminal_counts),
            "best_moving_average": self.best_moving_average,
        }

    def save_checkpoint(self, name: Optional[str] = None) -> Path:
        data = self.agent.encode(self._checkpoint_metadata())
        ckpt_dir = self.out_dir / CHECKPOINT_DIR_NAME
        if name is not None:
            write_checkpoint_file(ckpt_dir / name, data)
        path = self.out_dir / LAST_CHECKPOINT_NAME
        write_checkpoint_file(path, data)
        self.last_checkpoint = path
        Logger.custom(f"episode {self.episode}: saved {name or LAST_CHECKPOINT_NAME}", CHECKPOINT_BADGE)
        return path

    def _run_episode(self) -> tuple[EpisodeResult, float]:
        arena, env_config = self.schedule.next()
        env = NavigationEnv(arena, env_config, self.rngs["env"])
        agent_rng = self.rngs["agent"]
        obs = env.reset(self.episode)
        key = self.agent.state_key(obs, env)
        epsilon = epsilon_at(self.cfg.epsilon, self.global_step)
        done = False
        while not done:
            epsilon = epsilon_at(self.cfg.epsilon, self.global_step)
            action = select_action(self.agent.qvalues(key), epsilon, agent_rng)
            obs, reward, done, info = env.step(action)
            next_key = self.agent.state_key(obs, env)
            self.global_step += 1
            loss = self.agent.observe(
                key, action, reward, next_key, learns_from(info["terminal"]), self.global_step, agent_rng
            )
            if loss is not None and Logger.is_debug() and self.global_step % 1000 == 0:
                Logger.debug(f"step {self.global_step}: loss {loss:.6g}")
            key = next_key
        return env.result(), epsilon

    def _periodic_eval(self):
        cfg = self.cfg
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _PERIODIC_EVAL_STREAM, self.episode]))
        schedule = ArenaSchedule(cfg, rng)
        snapshot = self.agent.snapshot()
        results: list[EpisodeResult] = []
        for i in range(cfg.eval_episodes):
            arena, env_config = schedule.next()
            env = NavigationEnv(arena, env_config, rng)
            results.append(play_episode(snapshot, env, self.episode + i, arena, 0.0, rng))
        goals = sum(r.terminal == "goal" for r in results)
        mean_reward = sum(r.total_reward for r in results) / max(len(results), 1)
        Logger.custom(
            f"after episode {self.episode}: {goals}/{len(results)} goals, mean reward {mean_reward:.3f}", EVAL_BADGE
        )

    def _report(self, started: float, metrics_path: Path) -> TrainingReport:
        recent = list(self.recent_terminals)
        return TrainingReport(
            episodes=self.episode,
            terminal_counts={reason: self.terminal_counts.get(reason, 0) for reason in TERMINAL_REASONS},
            best_moving_average=self.best_moving_average,
            final_goal_rate=recent.count("goal") / len(recent) if recent else 0.0,
            final_collision_rate=recent.count("collision") / len(recent) if recent else 0.0,
            wall_time=time.time() - started,
            metrics_path=metrics_path,
            last_checkpoint=self.last_checkpoint,
        )

    def run(self) -> TrainingReport:
        cfg = self.cfg
        started = time.time()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        write_config_echo(cfg, self.out_dir)
        metrics_path = self.out_dir / METRICS_FILE_NAME
        resume_episode = self.episode if self.episode > 0 or self.global_step > 0 else None
        Logger.info(f"training {cfg.algorithm} on {cfg.arena} for {cfg.episodes} episodes (seed {cfg.seed})")
        with MetricsWriter(metrics_path, resume_episode) as writer:
            try:
                while self.episode < cfg.episodes:
                    try:
                        result, epsilon = self._run_episode()
                    except NonFiniteLossError:
                        self.save_checkpoint(f"nonfinite_episode_{self.episode:06d}.ckpt")
                        raise
                    if result.terminal == "collision":
                        self.cumulative_collisions += 1
                    moving_avg = self.moving.push(result.total_reward)
                    if self.best_moving_average is None or moving_avg > self.best_moving_average:
                        self.best_moving_average = moving_avg
                    self.recent_terminals.append(result.terminal)
                    self.terminal_counts[result.terminal] += 1
                    row = metrics_row(self.episode, result, moving_avg, epsilon, self.cumulative_collisions)
                    self.episode += 1
                    try:
                        writer.write(row)
                    except OSError:
                        self.save_checkpoint()
                        raise
                    Logger.debug(
                        f"episode {row['episode']}: {result.terminal} after {result.steps} steps, "
                        f"reward {result.total_reward:.3f}"
                    )
                    show_training_progress(self.episode, cfg.episodes, moving_avg, epsilon, time.time() - started)
                    if cfg.checkpoint_interval and self.episode % cfg.checkpoint_interval == 0:
                        Logger.custom(
                            f"{self.episode}/{cfg.episodes} moving average {moving_avg:.3f}, "
                            f"{self.cumulative_collisions} collisions so far",
                            EPISODE_BADGE,
                        )
                        self.save_checkpoint(f"episode_{self.episode:06d}.ckpt")
                    if cfg.eval_interval and self.episode % cfg.eval_interval == 0:
                        self._periodic_eval()
            except KeyboardInterrupt:
                Logger.warning(f"interrupted during episode {self.episode}")
                self.save_checkpoint()
                raise
        self.save_checkpoint()
        report = self._report(started, metrics_path)
        Logger.info(
            f"trained {report.episodes} episodes in {duration_format(report.wall_time)}, "
            f"goal rate over the last {FINAL_WINDOW}: {report.final_goal_rate:.2f}"
        )
        return report


def train(
    cfg: RunConfig, out_dir: Union[str, Path], resume: Optional[Union[str, Path]] = None
) -> TrainingReport:
    """Train per ``cfg`` into ``out_dir``; fully determined by the config and its seed"""
    return Trainer(cfg, out_dir, resume).run()


def evaluate(
    checkpoint: Union[str, Path],
    arena_source: Optional[str],
    episodes: int,
    out_dir: Union[str, Path],
    epsilon: float = 0.0,
    seed: Optional[int] = None,
) -> EvalReport:
    """Run episodes with a trained agent; never learns and never writes parameters"""
    if episodes < 0:
        raise ConfigError("episodes must be non-negative")
    data = read_checkpoint_file(checkpoint)
    metadata, _ = decode_records(data)
    if "config" not in metadata:
        raise CheckpointFormatError(f"checkpoint `{checkpoint}` carries no run config")
    cfg = parse_run_config(metadata["config"])
    cfg = replace(cfg, arena=arena_source or cfg.arena, seed=cfg.seed if seed is None else seed)
    agent, _ = restore_agent(cfg, data)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_config_echo(cfg, out)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _EVAL_STREAM]))
    schedule = ArenaSchedule(cfg, rng)
    if isinstance(agent, TabularGridAgent) and agent.table.n_states != grid_state_count(
        schedule.first(), cfg.learning.grid_cell
    ):
        raise ConfigError("tabular-grid checkpoint does not match the evaluation arena")
    moving = MovingAverage(cfg.moving_average_window)
    counts: Counter[str] = Counter()
    rewards: list[float] = []
    collisions = 0
    metrics_path = out / EVAL_METRICS_FILE_NAME
    Logger.custom(f"evaluating {checkpoint} on {cfg.arena} for {episodes} episodes", EVAL_BADGE)
    with MetricsWriter(metrics_path) as writer:
        for episode in range(episodes):
            arena, env_config = schedule.next()
            result = play_episode(agent, NavigationEnv(arena, env_config, rng), episode, arena, epsilon, rng)
            collisions += result.terminal == "collision"
            counts[result.terminal] += 1
            rewards.append(result.total_reward)
            writer.write(metrics_row(episode, result, moving.push(result.total_reward), epsilon, collisions))
    goal_rate = counts["goal"] / episodes if episodes else 0.0
    Logger.custom(f"{counts['goal']}/{episodes} goals, {collisions} collisions", EVAL_BADGE)
    return EvalReport(
        episodes=episodes,
        terminal_counts={reason: counts.get(reason, 0) for reason in TERMINAL_REASONS},
        goal_rate=goal_rate,
        mean_reward=sum(rewards) / len(rewards) if rewards else 0.0,
        metrics_path=metrics_path,
    )
