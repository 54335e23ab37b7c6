from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from deeprotor.utils.console.logger import Logger

TEST_DIR = Path("./__test_files__")

# a run small enough for unit tests: corridor arena, 12x12 camera, one conv layer
TINY_RUN_CONFIG = """\
run.arena builtin:corridor
run.algorithm dqn
run.episodes 6
run.seed 3
run.checkpoint_interval 3
run.dt 0.5
run.moving_average_window 4

budget.base_steps 15
budget.steps_per_episode 0
budget.cap 15

camera.width 12
camera.height 12

learning.batch_size 8
learning.train_frequency 2
learning.warmup 16
learning.buffer_capacity 200
learning.target_sync_interval 20

epsilon.start 1.0
epsilon.end 0.1
epsilon.decay_steps 60

network.convs 4x3x2
network.hidden 16
optimizer.step_size 0.001
"""


def pytest_sessionstart(session: pytest.Session):
    TEST_DIR.mkdir(exist_ok=True)


def pytest_sessionfinish(session: pytest.Session, exitstatus: int):
    if TEST_DIR.exists():
        shutil.rmtree(TEST_DIR)


@pytest.fixture(autouse=True)
def _quiet_status_bar():
    yield
    Logger.status.disable()


def scratch_dir(name: str) -> Path:
    """Fresh directory under ``TEST_DIR``"""
    path = TEST_DIR / name
    if path.exists():
        shutil.rmtree(path)
    path.mkdir(parents=True)
    return path
