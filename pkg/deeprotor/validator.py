from __future__ import annotations

import argparse
import os

from deeprotor.exceptions import ConfigError
from deeprotor.processor.config import RunConfig
from deeprotor.utils.console.colorful import set_no_color
from deeprotor.utils.console.logger import Logger, set_logger_debug
from deeprotor.world import is_random_zone_source, load_arena_source


def initial_validate(args: argparse.Namespace):
    """Process-wide console setup, run once per invocation"""

    if not args.no_progress:
        Logger.enable_statusbar()

    # --no-color or a non-empty NO_COLOR both disable colours
    # See also: https://no-color.org/
    if args.no_color or os.environ.get("NO_COLOR"):
        set_no_color()

    if args.debug:
        set_logger_debug()


def validate_run_config(cfg: RunConfig):
    """Checks spanning several config sections, which the dataclasses cannot do on their own"""

    for name, value in (
        ("run.episodes", cfg.episodes),
        ("run.checkpoint_interval", cfg.checkpoint_interval),
        ("run.eval_interval", cfg.eval_interval),
        ("run.eval_episodes", cfg.eval_episodes),
    ):
        if value < 0:
            raise ConfigError(f"{name} must be non-negative, got {value}")
    if cfg.moving_average_window < 1:
        raise ConfigError("run.moving_average_window must be at least 1")

    # resolves builtin names and checks that arena files exist and parse
    if not is_random_zone_source(cfg.arena):
        load_arena_source(cfg.arena, cfg.seed, cfg.env.vehicle_radius, cfg.env.altitude)

    if cfg.algorithm == "tabular-grid":
        if is_random_zone_source(cfg.arena):
            raise ConfigError("tabular-grid learns one arena, pick a single wobbles zone")
        if cfg.learning.alpha <= 0:
            raise ConfigError("tabular-grid needs learning.alpha > 0")
    else:
        if not cfg.env.render_observation:
            raise ConfigError(f"{cfg.algorithm} learns from depth images, run.render_observation must be true")
        cfg.architecture().output_shapes()
        if cfg.learning.batch_size > cfg.learning.buffer_capacity:
            raise ConfigError("learning.batch_size exceeds learning.buffer_capacity")
    if cfg.env.actions.mode == "lateral-roll" and cfg.env.heading_hold:
        Logger.debug("heading hold only corrects yaw-rate actions, ignored for lateral-roll")
