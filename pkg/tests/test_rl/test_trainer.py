from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from deeprotor.env import NavigationEnv
from deeprotor.exceptions import ConfigError, NonFiniteLossError, ShapeMismatchError
from deeprotor.nn import read_checkpoint_file
from deeprotor.processor.config import ECHO_FILE_NAME, RunConfig, parse_run_config
from deeprotor.processor.metrics import METRICS_HEADER, read_metrics
from deeprotor.processor.parser import read_text_file
from deeprotor.rl.trainer import (
    ArenaSchedule,
    Trainer,
    evaluate,
    grid_state_count,
    grid_state_index,
    learns_from,
    restore_agent,
    spawn_rngs,
    train,
)
from deeprotor.validator import validate_run_config
from deeprotor.world import build_corridor_arena

from ..conftest import TINY_RUN_CONFIG, scratch_dir


def tiny_config(**overrides: object) -> RunConfig:
    return replace(parse_run_config(TINY_RUN_CONFIG), **overrides)  # type: ignore


@pytest.mark.rl
def test_zero_episodes():
    out = scratch_dir("trainer/zero")
    report = train(tiny_config(episodes=0), out)
    assert (out / "metrics.csv").read_text(encoding="utf-8") == ",".join(METRICS_HEADER) + "\n"
    assert (out / "last.ckpt").is_file()
    assert report.episodes == 0
    assert report.best_moving_average is None
    assert report.final_goal_rate == 0.0


@pytest.mark.rl
def test_training_output_layout():
    cfg = tiny_config()
    out = scratch_dir("trainer/layout")
    report = train(cfg, out)
    assert report.episodes == 6
    assert sum(report.terminal_counts.values()) == 6
    assert report.last_checkpoint == out / "last.ckpt"
    assert sorted(p.name for p in (out / "checkpoints").iterdir()) == ["episode_000003.ckpt", "episode_000006.ckpt"]
    assert parse_run_config(read_text_file(out / ECHO_FILE_NAME, lambda message, line_number: ConfigError(message))) == cfg

    rows = read_metrics(out / "metrics.csv")
    assert [row["episode"] for row in rows] == list(range(6))
    assert all(1 <= row["steps"] <= 15 for row in rows)
    epsilons = [row["epsilon"] for row in rows]
    assert all(later <= earlier for earlier, later in zip(epsilons, epsilons[1:]))
    collisions = [row["cumulative_collisions"] for row in rows]
    assert collisions[-1] == report.terminal_counts["collision"]


@pytest.mark.rl
@pytest.mark.parametrize("algorithm", ["dqn", "ddqn", "tabular-grid"])
def test_same_seed_same_run(algorithm: str):
    cfg = tiny_config(algorithm=algorithm)
    first, second = scratch_dir(f"trainer/{algorithm}-a"), scratch_dir(f"trainer/{algorithm}-b")
    train(cfg, first)
    train(cfg, second)
    assert (first / "metrics.csv").read_bytes() == (second / "metrics.csv").read_bytes()
    assert (first / "last.ckpt").read_bytes() == (second / "last.ckpt").read_bytes()


@pytest.mark.rl
@pytest.mark.parametrize("algorithm", ["dqn", "ddqn", "tabular-grid"])
def test_resume_matches_uninterrupted_run(algorithm: str):
    cfg = tiny_config(algorithm=algorithm)
    straight = scratch_dir(f"trainer/straight-{algorithm}")
    train(cfg, straight)

    resumed = scratch_dir(f"trainer/resumed-{algorithm}")
    train(replace(cfg, episodes=3), resumed)
    train(cfg, resumed, resume=resumed / "last.ckpt")
    assert (resumed / "metrics.csv").read_bytes() == (straight / "metrics.csv").read_bytes()
    assert (resumed / "last.ckpt").read_bytes() == (straight / "last.ckpt").read_bytes()


@pytest.mark.rl
def test_periodic_eval_is_logged_only(capsys: pytest.CaptureFixture[str]):
    cfg = tiny_config()
    quiet, evaluated = scratch_dir("trainer/no-eval"), scratch_dir("trainer/with-eval")
    train(cfg, quiet)
    train(replace(cfg, eval_interval=2, eval_episodes=2), evaluated)
    out = capsys.readouterr().out
    assert "after episode 2: " in out
    assert "after episode 6: " in out
    assert (quiet / "metrics.csv").read_bytes() == (evaluated / "metrics.csv").read_bytes()


@pytest.mark.rl
def test_interrupt_saves_and_resumes(monkeypatch: pytest.MonkeyPatch):
    cfg = tiny_config()
    straight = scratch_dir("trainer/uninterrupted")
    train(cfg, straight)

    def stop_after_two(episode: int, *args: object, **kwargs: object):
        if episode == 2:
            raise KeyboardInterrupt

    out = scratch_dir("trainer/interrupted")
    with monkeypatch.context() as patch:
        patch.setattr("deeprotor.rl.trainer.show_training_progress", stop_after_two)
        with pytest.raises(KeyboardInterrupt):
            train(cfg, out)
    assert len(read_metrics(out / "metrics.csv")) == 2
    train(cfg, out, resume=out / "last.ckpt")
    assert (out / "metrics.csv").read_bytes() == (straight / "metrics.csv").read_bytes()


@pytest.mark.rl
def test_non_finite_loss_saves_a_checkpoint(monkeypatch: pytest.MonkeyPatch):
    def diverge(*args: object, **kwargs: object) -> float:
        raise NonFiniteLossError("loss is nan")

    monkeypatch.setattr("deeprotor.rl.trainer.train_step", diverge)
    out = scratch_dir("trainer/nonfinite")
    with pytest.raises(NonFiniteLossError):
        train(tiny_config(), out)
    assert len(list((out / "checkpoints").glob("nonfinite_episode_*.ckpt"))) == 1


@pytest.mark.rl
def test_restore_checks_the_config():
    out = scratch_dir("trainer/restore")
    train(tiny_config(episodes=1), out)
    data = read_checkpoint_file(out / "last.ckpt")
    agent, metadata = restore_agent(tiny_config(), data)
    assert agent.algorithm == "dqn"
    assert metadata["episode"] == 1
    with pytest.raises(ConfigError):
        restore_agent(tiny_config(algorithm="ddqn"), data)
    wider = tiny_config()
    with pytest.raises(ShapeMismatchError):
        restore_agent(replace(wider, network=replace(wider.network, hidden=8)), data)


@pytest.mark.rl
def test_evaluate_never_writes_parameters():
    train_out = scratch_dir("trainer/eval-source")
    train(tiny_config(episodes=2), train_out)
    checkpoint = train_out / "last.ckpt"
    before = checkpoint.read_bytes()

    out = scratch_dir("trainer/eval")
    report = evaluate(checkpoint, None, 10, out)
    assert report.episodes == 10
    assert sum(report.terminal_counts.values()) == 10
    assert [row["episode"] for row in read_metrics(out / "eval_metrics.csv")] == list(range(10))
    assert all(row["epsilon"] == 0.0 for row in read_metrics(out / "eval_metrics.csv"))
    assert (out / ECHO_FILE_NAME).is_file()
    assert not list(out.rglob("*.ckpt"))
    assert checkpoint.read_bytes() == before

    again = scratch_dir("trainer/eval-again")
    evaluate(checkpoint, None, 10, again)
    assert (again / "eval_metrics.csv").read_bytes() == (out / "eval_metrics.csv").read_bytes()
    with pytest.raises(ConfigError):
        evaluate(checkpoint, None, -1, out)


@pytest.mark.rl
def test_evaluate_tabular_on_another_arena():
    train_out = scratch_dir("trainer/eval-tabular")
    train(tiny_config(algorithm="tabular-grid", episodes=1), train_out)
    with pytest.raises(ConfigError):
        evaluate(train_out / "last.ckpt", "builtin:wobbles-a", 1, scratch_dir("trainer/eval-tabular-out"))


@pytest.mark.rl
def test_random_zone_schedule():
    cfg = tiny_config(arena="builtin:wobbles")
    schedule = ArenaSchedule(cfg, spawn_rngs(0)["arena"])
    assert schedule.is_random
    seen = set()
    for _ in range(40):
        arena, env_config = schedule.next()
        seen.add(arena.name)
        assert env_config.reward.mode == ("checkpoint" if arena.checkpoints else "line")
    assert seen == {"wobbles-a", "wobbles-b", "wobbles-c", "wobbles-d"}
    with pytest.raises(ConfigError):
        Trainer(replace(cfg, algorithm="tabular-grid"), scratch_dir("trainer/random-tabular"))


@pytest.mark.rl
def test_grid_state_index():
    arena = build_corridor_arena()
    cfg = tiny_config()
    env = NavigationEnv(arena, replace(cfg.env, render_observation=False), np.random.default_rng(0))
    env.reset(0)
    assert grid_state_count(arena, 1.0) == 30 * 10 * 8
    assert grid_state_index(env, 1.0) == (5 * 30 + 2) * 8
    env.state = replace(env.state, yaw=350.0)
    assert grid_state_index(env, 1.0) == (5 * 30 + 2) * 8
    env.state = replace(env.state, yaw=90.0)
    assert grid_state_index(env, 1.0) == (5 * 30 + 2) * 8 + 2
    # positions outside the bounds clamp to the border cells
    env.state = replace(env.state, x=-3.0, y=99.0, yaw=0.0)
    assert grid_state_index(env, 1.0) == (9 * 30 + 0) * 8
    assert 0 <= grid_state_index(env, 2.5) < grid_state_count(arena, 2.5)


@pytest.mark.rl
def test_learns_from():
    assert not learns_from(None)
    assert not learns_from("step_limit")
    for terminal in ("collision", "goal", "deviation", "away_from_goal"):
        assert learns_from(terminal)  # type: ignore


@pytest.mark.rl
def test_validate_run_config():
    validate_run_config(tiny_config())
    with pytest.raises(ConfigError):
        validate_run_config(tiny_config(algorithm="tabular-grid", arena="builtin:wobbles"))
    with pytest.raises(ConfigError):
        validate_run_config(tiny_config(episodes=-1))
    with pytest.raises(ConfigError):
        validate_run_config(tiny_config(arena="builtin:nowhere"))
    cfg = tiny_config()
    with pytest.raises(ConfigError):
        validate_run_config(replace(cfg, env=replace(cfg.env, render_observation=False)))
    with pytest.raises(ConfigError):
        validate_run_config(replace(cfg, learning=replace(cfg.learning, batch_size=500)))
    with pytest.raises(ConfigError):
        validate_run_config(replace(cfg, algorithm="tabular-grid", learning=replace(cfg.learning, alpha=0.0)))
