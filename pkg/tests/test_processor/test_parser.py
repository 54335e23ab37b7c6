from __future__ import annotations

import pytest

from deeprotor.processor.parser import Directive, is_comment, iter_directives, strip_comment


@pytest.mark.processor
def test_iter_directives():
    text = "# header\n\nbox 1 2 3   # trailing\n   \n  goal 4 5\nwalls\n"
    assert list(iter_directives(text)) == [
        Directive(3, "box", ["1", "2", "3"]),
        Directive(5, "goal", ["4", "5"]),
        Directive(6, "walls", []),
    ]


@pytest.mark.processor
def test_comments():
    assert is_comment("# note")
    assert not is_comment("box 1 # note")
    assert strip_comment("box 1 2 # note ") == "box 1 2"
    assert strip_comment("  goal 3 4  ") == "goal 3 4"
