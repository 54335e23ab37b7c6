from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Optional

from deeprotor.__version__ import VERSION as deeprotor_version
from deeprotor._typing import Pose
from deeprotor.exceptions import DeepRotorBaseException, ErrorCode, ReturnCode, SuccessCode
from deeprotor.processor.config import (
    ECHO_FILE_NAME,
    RunConfig,
    load_run_config,
    resolve_seed,
    seed_override,
)
from deeprotor.processor.metrics import DEFAULT_WINDOW
from deeprotor.processor.plotter import emit_plots
from deeprotor.rl.trainer import LAST_CHECKPOINT_NAME, evaluate, train
from deeprotor.sensor import normalize_depth, render_depth, write_pgm
from deeprotor.utils.console.logger import Logger
from deeprotor.validator import initial_validate, validate_run_config
from deeprotor.world import load_arena_source


def parse_pose(text: str) -> Pose:
    """``x,y,z,yaw`` in metres and degrees"""
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"pose `{text}` must look like x,y,z,yaw")
    try:
        return Pose(*(float(part) for part in parts))
    except ValueError:
        raise argparse.ArgumentTypeError(f"pose `{text}` holds a non-numeric value")


def cli() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="deeprotor, depth-camera quadcopter navigation trained with deep Q-learning", prog="deeprotor"
    )
    parser.add_argument("-v", "--version", action="version", version=f"%(prog)s {deeprotor_version}")
    parser.add_argument("--no-color", action="store_true", help="disable coloured output")
    parser.add_argument("--no-progress", action="store_true", help="hide the progress line")
    parser.add_argument("--debug", action="store_true", help="enable debug logging")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    parser_train = commands.add_parser("train", help="train an agent")
    parser_train.add_argument("--config", required=True, help="run config file")
    parser_train.add_argument("--resume", help="checkpoint to continue from")
    parser_train.add_argument("--out", required=True, help="output directory")
    parser_train.add_argument("--seed", type=int, help="master seed, overrides run.seed and DEEPROTOR_SEED")

    parser_eval = commands.add_parser("eval", help="run episodes with a trained agent, without learning")
    parser_eval.add_argument("--model", required=True, help="checkpoint to evaluate")
    parser_eval.add_argument("--arena", help="arena source, defaults to the training arena")
    parser_eval.add_argument("--episodes", type=int, default=10, help="number of episodes")
    parser_eval.add_argument("--out", required=True, help="output directory")
    parser_eval.add_argument("--epsilon", type=float, default=0.0, help="exploration rate while evaluating")
    parser_eval.add_argument("--seed", type=int, help="master seed, overrides the trained one")

    parser_render = commands.add_parser("render-depth", help="write the depth image seen from a pose as PGM")
    parser_render.add_argument("--arena", required=True, help="arena source (file or builtin:NAME)")
    parser_render.add_argument("--pose", type=parse_pose, help="x,y,z,yaw, defaults to the arena start pose")
    parser_render.add_argument("--out", required=True, help="PGM file to write")
    parser_render.add_argument("--config", help="run config providing the camera and flight altitude")
    parser_render.add_argument("--seed", type=int, help="seed of generated arenas")

    parser_plot = commands.add_parser("plot", help="render the SVG figures of a metrics CSV")
    parser_plot.add_argument("--metrics", required=True, help="metrics CSV")
    parser_plot.add_argument("--out", required=True, help="output directory")
    parser_plot.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="moving-average window")

    return parser


def run_train(args: argparse.Namespace) -> ReturnCode:
    cfg = resolve_seed(load_run_config(args.config), args.seed)
    validate_run_config(cfg)
    try:
        report = train(cfg, args.out, args.resume)
    except KeyboardInterrupt:
        Logger.info(f"stopped, continue with --resume {Path(args.out) / LAST_CHECKPOINT_NAME}")
        return ErrorCode.INTERRUPTED
    counts = ", ".join(f"{reason} {count}" for reason, count in report.terminal_counts.items() if count)
    Logger.info(f"terminals: {counts or 'none'}")
    if report.best_moving_average is not None:
        Logger.info(f"best moving-average reward {report.best_moving_average:.3f}")
    Logger.info(f"metrics written to {report.metrics_path}")
    return SuccessCode.SUCCESS


def run_eval(args: argparse.Namespace) -> ReturnCode:
    report = evaluate(args.model, args.arena, args.episodes, args.out, args.epsilon, seed_override(args.seed))
    Logger.info(f"goal rate {report.goal_rate:.2f}, mean reward {report.mean_reward:.3f}")
    Logger.info(f"metrics written to {report.metrics_path}")
    return SuccessCode.SUCCESS


def run_render_depth(args: argparse.Namespace) -> ReturnCode:
    cfg = resolve_seed(load_run_config(args.config) if args.config else RunConfig(), args.seed)
    arena = load_arena_source(args.arena, cfg.seed, cfg.env.vehicle_radius, cfg.env.altitude)
    pose: Optional[Pose] = args.pose
    if pose is None:
        pose = Pose(arena.start.x, arena.start.y, cfg.env.altitude, arena.start.yaw)
    obs = normalize_depth(render_depth(arena, pose, cfg.env.camera), cfg.env.camera.max_range)
    write_pgm(args.out, obs)
    Logger.info(f"{obs.width}x{obs.height} depth image from {tuple(pose)} written to {args.out}")
    return SuccessCode.SUCCESS


def run_plot(args: argparse.Namespace) -> ReturnCode:
    if args.window < 1:
        Logger.error("--window must be at least 1")
        return ErrorCode.WRONG_ARGUMENT_ERROR
    specs = emit_plots(args.metrics, args.out, args.window)
    Logger.info(f"{', '.join(specs)} written to {args.out}")
    return SuccessCode.SUCCESS


COMMANDS = {
    "train": run_train,
    "eval": run_eval,
    "render-depth": run_render_depth,
    "plot": run_plot,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` (``sys.argv[1:]`` when omitted) and run one sub-command; returns the exit code"""
    parser = cli()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed usage or the version
        return e.code if isinstance(e.code, int) else ErrorCode.WRONG_ARGUMENT_ERROR.value
    initial_validate(args)
    Logger.debug(f"arguments: {args}")
    try:
        code = COMMANDS[args.command](args)
    except DeepRotorBaseException as e:
        Logger.error(e.message)
        code = e.code
    except OSError as e:
        Logger.error(f"{e.strerror or e}: {e.filename}" if e.filename else str(e))
        code = ErrorCode.IO_ERROR
    except KeyboardInterrupt:
        Logger.info("stopped")
        code = ErrorCode.INTERRUPTED
    finally:
        Logger.status.disable()
    if args.command in ("train", "eval") and code == SuccessCode.SUCCESS:
        Logger.debug(f"resolved config echoed to {Path(args.out) / ECHO_FILE_NAME}")
    return code.value


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
