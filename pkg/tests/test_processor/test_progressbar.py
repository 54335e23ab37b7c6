from __future__ import annotations

import pytest

from deeprotor.processor.progressbar import ProgressBar, training_status
from deeprotor.utils.console.colorful import no_colored_string
from deeprotor.utils.console.formatter import duration_format, get_string_width


@pytest.mark.processor
def test_progress_bar_render():
    bar = ProgressBar(width=10)
    assert no_colored_string(bar.render(1.0)) == "█" * 10
    assert no_colored_string(bar.render(0.5)) == "█" * 5 + "▏" + " " * 4
    assert no_colored_string(bar.render(-1.0)) == "▏" + " " * 9
    for fraction in (0.0, 0.13, 0.5, 0.99, 1.0, 2.0):
        assert get_string_width(bar.render(fraction)) == 10


@pytest.mark.processor
def test_training_status():
    text = no_colored_string(training_status(3, 10, 12.3456, 0.5, 125.0))
    assert "train" in text
    assert "3/10" in text
    assert "12.346" in text
    assert "eps 0.500" in text
    assert text.endswith("2m05s")
    assert "eval" in no_colored_string(training_status(0, 0, 0.0, 0.0, 1.0, label="eval"))


@pytest.mark.processor
def test_duration_format():
    assert duration_format(3.24) == "3.2s"
    assert duration_format(125) == "2m05s"
    assert duration_format(3723) == "1h02m03s"
