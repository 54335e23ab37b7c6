from __future__ import annotations

import re
import sys
from typing import Final, Literal, NamedTuple, Union

# translate ANSI sequences into win32 console calls
if sys.platform == "win32":
    from colorama import just_fix_windows_console  # type: ignore

    just_fix_windows_console()

CSI: Final[str] = "\x1b["


class RGBColor(NamedTuple):
    r: int
    g: int
    b: int


BaseColor = Literal["black", "red", "green", "yellow", "blue", "magenta", "cyan", "white"]
TextColor = Literal[
    "black",
    "red",
    "green",
    "yellow",
    "blue",
    "magenta",
    "cyan",
    "white",
    "bright_black",
    "bright_red",
    "bright_green",
    "bright_yellow",
    "bright_blue",
    "bright_magenta",
    "bright_cyan",
    "bright_white",
]

Color = Union[TextColor, RGBColor]
Style = Literal["reset", "bold", "italic", "underline"]

_BASE_COLORS: Final[tuple[BaseColor, ...]] = ("black", "red", "green", "yellow", "blue", "magenta", "cyan", "white")
_STYLE_CODES: Final[dict[Style, int]] = {"reset": 0, "bold": 1, "italic": 3, "underline": 4}
_COLOR_CODE_REGEX = re.compile(r"\x1b\[(\d+;)*\d+m")

_no_color = False


def _color_code(color: Color, background: bool) -> list[int]:
    if isinstance(color, RGBColor):
        return [48 if background else 38, 2, *color]
    bright = color.startswith("bright_")
    index = _BASE_COLORS.index(color.removeprefix("bright_"))  # type: ignore
    base = (100 if bright else 40) if background else (90 if bright else 30)
    return [base + index]


def colored_string(
    string: str, fore: Color | None = None, back: Color | None = None, style: list[Style] | None = None
) -> str:
    if _no_color:
        return string
    codes: list[int] = []
    if fore is not None:
        codes += _color_code(fore, background=False)
    if back is not None:
        codes += _color_code(back, background=True)
    for s in style or []:
        codes.append(_STYLE_CODES[s])
    if not codes:
        return string
    return f"{CSI}{';'.join(map(str, codes))}m{string}{CSI}0m"


def no_colored_string(string: str) -> str:
    """Strip ANSI colour sequences"""
    return _COLOR_CODE_REGEX.sub("", string)


def set_no_color():
    global _no_color
    _no_color = True

