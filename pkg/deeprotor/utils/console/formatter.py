from __future__ import annotations

import unicodedata

from deeprotor.utils.console.colorful import no_colored_string


def get_char_width(char: str) -> int:
    if unicodedata.combining(char):
        return 0
    return 2 if unicodedata.east_asian_width(char) in ("W", "F") else 1


def get_string_width(string: str) -> int:
    """Printed width of a string, ignoring colour codes"""
    return sum(get_char_width(c) for c in no_colored_string(string))


def duration_format(seconds: float) -> str:
    """Format a duration as ``1h02m03s`` / ``2m03s`` / ``3.2s``"""
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, secs = divmod(int(round(seconds)), 60)
    hours, minutes = divmod(minutes, 60)
    if hours:
        return f"{hours}h{minutes:02}m{secs:02}s"
    return f"{minutes}m{secs:02}s"
