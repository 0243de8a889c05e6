"""
Pattern I/O
-----------
Golly-compatible RLE reading and writing, and placement of a pattern into a
simulation universe with a dead margin.

Accepted dialect: `#` comment lines before the header, one header line
`x = <int>, y = <int>[, rule = <rule>]`, then runs of `b`, `o` and `$` with
optional counts, terminated by `!` (or end of input). Rows shorter than the
declared width are padded with dead cells.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from lifescope import config
from main.errors import (
    AllocationTooLarge,
    ConfigError,
    MalformedHeader,
    RunOverflow,
    UnexpectedSymbol,
    UnsupportedRule,
)
from main.life_engine import Universe, words_per_row

logger = logging.getLogger("lifescope.patterns")

LIFE_RULE = "B3/S23"
MAX_LINE = 70

_HEADER = re.compile(
    r"^\s*x\s*=\s*(\d+)\s*,\s*y\s*=\s*(\d+)\s*(?:,\s*rule\s*=\s*(\S+?))?\s*$",
    re.IGNORECASE,
)
_LIFE_SPELLINGS = {"b3/s23", "s23/b3", "23/3"}


@dataclass(frozen=True)
class Pattern:
    width: int
    height: int
    rule: str
    live_cells: frozenset

    @property
    def population(self) -> int:
        return len(self.live_cells)

    @classmethod
    def from_array(cls, cells: np.ndarray, rule: str = LIFE_RULE) -> "Pattern":
        height, width = cells.shape
        ys, xs = np.nonzero(cells)
        return cls(width, height, rule, frozenset(zip(xs.tolist(), ys.tolist())))

    def to_array(self) -> np.ndarray:
        cells = np.zeros((self.height, self.width), dtype=np.uint8)
        for x, y in self.live_cells:
            cells[y, x] = 1
        return cells


def normalize_rule(rule: str) -> str:
    """Canonical spelling for the Life rule, the input unchanged otherwise."""
    return LIFE_RULE if rule.strip().lower() in _LIFE_SPELLINGS else rule.strip()


def _split_header(text: str) -> tuple:
    lines = text.splitlines()
    for i, line in enumerate(lines):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        match = _HEADER.match(line)
        if match is None:
            raise MalformedHeader(f"expected 'x = <int>, y = <int>' header, got {stripped[:40]!r}")
        return match, "\n".join(lines[i + 1:])
    raise MalformedHeader("no header line found")


def parse_rle(text: Union[bytes, str], permissive: bool = False) -> Pattern:
    """
    Decode an RLE document into a Pattern.

    Raises MalformedHeader, UnsupportedRule (unless permissive), RunOverflow
    and UnexpectedSymbol; nothing else escapes for any input.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    header, body = _split_header(text)
    width, height = int(header.group(1)), int(header.group(2))
    rule = normalize_rule(header.group(3) or LIFE_RULE)
    if rule != LIFE_RULE and not permissive:
        raise UnsupportedRule(rule)

    live = set()
    x = y = 0
    count = None
    for offset, ch in enumerate(body):
        if ch.isdigit() and ch.isascii():
            count = (count or 0) * 10 + int(ch)
            continue
        if ch.isspace():
            continue
        n = 1 if count is None else count
        count = None
        if ch == "!":
            break
        if ch == "b" or ch == "o":
            if n == 0:
                continue
            if x + n > width or y >= height:
                raise RunOverflow(x + n - 1, y, width, height)
            if ch == "o":
                live.update((x + i, y) for i in range(n))
            x += n
        elif ch == "$":
            y += n
            x = 0
            if y > height:
                raise RunOverflow(x, y, width, height)
        else:
            raise UnexpectedSymbol(ch, offset)
    return Pattern(width, height, rule, frozenset(live))


def _row_tokens(xs: list, tokens: list) -> None:
    x = 0
    i = 0
    while i < len(xs):
        start = xs[i]
        j = i
        while j + 1 < len(xs) and xs[j + 1] == xs[j] + 1:
            j += 1
        if start > x:
            tokens.append(_run(start - x, "b"))
        tokens.append(_run(j - i + 1, "o"))
        x = xs[j] + 1
        i = j + 1


def _run(n: int, tag: str) -> str:
    return tag if n == 1 else f"{n}{tag}"


def write_rle(p: Pattern) -> bytes:
    """
    Canonical RLE: header with rule, maximal runs, trailing dead runs and
    trailing empty rows omitted, lines of at most 70 characters, LF endings.
    An empty pattern is written as a single dead run.
    """
    rows = {}
    for x, y in p.live_cells:
        rows.setdefault(y, []).append(x)

    tokens = []
    if not rows:
        if p.width > 0 and p.height > 0:
            tokens.append("b")
    else:
        y = 0
        for row_y in sorted(rows):
            if row_y > y:
                tokens.append(_run(row_y - y, "$"))
            _row_tokens(sorted(rows[row_y]), tokens)
            y = row_y
    tokens.append("!")

    lines = [f"x = {p.width}, y = {p.height}, rule = {p.rule}"]
    current = ""
    for token in tokens:
        if current and len(current) + len(token) > MAX_LINE:
            lines.append(current)
            current = ""
        current += token
    lines.append(current)
    return "\n".join(lines).encode("ascii")


def read_pattern(path: Union[str, Path], permissive: bool = False) -> Pattern:
    data = Path(path).read_bytes()
    pattern = parse_rle(data, permissive=permissive)
    logger.info("loaded %s: %dx%d, %d live cells", path, pattern.width,
                pattern.height, pattern.population)
    return pattern


def write_pattern(path: Union[str, Path], p: Pattern) -> None:
    Path(path).write_bytes(write_rle(p))


def place(p: Pattern, margin: int = config.PLACE_MARGIN,
          budget: int = config.MAX_UNIVERSE_BYTES) -> Universe:
    """Universe of (width + 2*margin) x (height + 2*margin) with p offset by (margin, margin)."""
    if margin < 0:
        raise ConfigError(f"margin must be >= 0, got {margin}")
    width = p.width + 2 * margin
    height = p.height + 2 * margin
    nbytes = height * words_per_row(width) * 8
    if nbytes > budget:
        raise AllocationTooLarge(width, height, nbytes, budget)
    cells = np.zeros((height, width), dtype=np.uint8)
    if p.live_cells:
        coords = np.array(sorted(p.live_cells), dtype=np.int64)
        cells[coords[:, 1] + margin, coords[:, 0] + margin] = 1
    return Universe.from_array(cells)
