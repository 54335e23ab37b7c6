from __future__ import annotations

import shutil


def get_terminal_size() -> tuple[int, int]:
    """Console (columns, lines), falling back to 80x25 when not attached to a terminal"""
    size = shutil.get_terminal_size(fallback=(80, 25))
    return (size.columns or 80, size.lines or 25)
