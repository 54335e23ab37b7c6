from __future__ import annotations

from collections.abc import Callable, Iterator
from pathlib import Path
from typing import NamedTuple

from deeprotor.exceptions import DeepRotorBaseException
from deeprotor.utils.console.logger import Logger


class Directive(NamedTuple):
    line_number: int
    keyword: str
    args: list[str]


def is_comment(line: str) -> bool:
    return line.startswith("#")


def strip_comment(line: str) -> str:
    """Drop a trailing ``# ...`` comment and surrounding whitespace"""
    index = line.find("#")
    if index >= 0:
        line = line[:index]
    return line.strip()


def iter_directives(text: str) -> Iterator[Directive]:
    """Tokenize the line-oriented text format shared by arena and run-config files

    Blank lines and ``#`` comments are skipped, remaining lines are split on whitespace and
    yielded with their 1-based line number.
    """
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or is_comment(line):
            continue
        tokens = strip_comment(line).split()
        yield Directive(line_number, tokens[0], tokens[1:])


def read_text_file(path: str | Path, invalid: Callable[[str, int], DeepRotorBaseException]) -> str:
    """Read a UTF-8 text file; undecodable bytes raise ``invalid(message, line_number)``"""
    file_path = Path(path)
    Logger.debug(f"reading {file_path}")
    data = file_path.read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line_number = data.count(b"\n", 0, e.start) + 1
        raise invalid(f"`{file_path}` is not valid UTF-8 ({e.reason} at byte {e.start})", line_number)
