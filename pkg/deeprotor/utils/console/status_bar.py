from __future__ import annotations

import sys

from deeprotor.utils.console.formatter import get_string_width


class StatusBar:
    """Single refreshing line at the bottom of the log, used for training progress

    Log lines clear it, and it is drawn again below them.
    """

    _enabled = False
    _text = ""
    _last_line_width = 0

    @classmethod
    def enable(cls):
        cls._enabled = True

    @classmethod
    def disable(cls):
        cls.clear()
        cls._text = ""
        cls._enabled = False

    @classmethod
    def clear(cls):
        if not cls._enabled or not cls._last_line_width:
            return
        sys.stdout.write("\r" + cls._last_line_width * " " + "\r")
        cls._last_line_width = 0

    @classmethod
    def set(cls, text: str):
        cls._text = text
        cls.redraw()

    @classmethod
    def redraw(cls):
        if not cls._enabled or not cls._text:
            return
        cls.clear()
        sys.stdout.write(cls._text + "\r")
        sys.stdout.flush()
        cls._last_line_width = get_string_width(cls._text)
