"""Line-oriented tokenizer shared by coefficient, problem and spec files.

Every non-blank line is one of::

    key = value                 # trailing comment
    [keyword arg arg ...] payload

The payload of a section line is kept raw; callers read it either as a bare
value (a group string) or as ``name = value`` pairs.  Positions are 1-based
and every error carries the set of tokens that would have been accepted.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ParseError
from .fgab import FgAbGroup
from .matrix import Matrix

_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_WORD = re.compile(r"[^\s\[\]=#]+")


@dataclass(frozen=True)
class Line:
    lineno: int
    column: int
    kind: str                  # "assign" or "section"
    key: str                   # assigned key, or section keyword
    args: tuple[str, ...]      # section arguments
    arg_columns: tuple[int, ...]
    value: str                 # assigned value, or raw section payload
    value_column: int
    comment: str | None

    def error(self, message: str, column: int | None = None, expected=(), source=None):
        return ParseError(message, self.lineno, column or self.column, expected, source)


def _split_comment(raw: str) -> tuple[str, str | None]:
    depth = 0
    for i, ch in enumerate(raw):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "#" and depth <= 0:
            return raw[:i], raw[i + 1:].strip()
    return raw, None


def tokenize(text: str, source: str | None = None) -> list[Line]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, comment = _split_comment(raw)
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("["):
            lines.append(_section(lineno, col, body, comment, source))
        else:
            m = _KEY.match(body, col - 1)
            if not m:
                raise ParseError("expected a key or a section", lineno, col,
                                 ("key", "["), source)
            pos = m.end()
            while pos < len(body) and body[pos] in " \t":
                pos += 1
            if pos >= len(body) or body[pos] != "=":
                raise ParseError(f"expected '=' after {m.group()!r}", lineno, pos + 1, ("=",), source)
            pos += 1
            while pos < len(body) and body[pos] in " \t":
                pos += 1
            value = body[pos:].rstrip()
            if not value:
                raise ParseError(f"missing value for {m.group()!r}", lineno, pos + 1, ("value",), source)
            lines.append(Line(lineno, col, "assign", m.group(), (), (), value, pos + 1, comment))
    return lines


def _section(lineno, col, body, comment, source) -> Line:
    close = body.find("]", col - 1)
    if close < 0:
        raise ParseError("unterminated section header", lineno, len(body.rstrip()) + 1, ("]",), source)
    words, cols = [], []
    for m in _WORD.finditer(body, col, close):
        words.append(m.group())
        cols.append(m.start() + 1)
    if not words:
        raise ParseError("empty section header", lineno, col + 1, ("section keyword",), source)
    pos = close + 1
    while pos < len(body) and body[pos] in " \t":
        pos += 1
    return Line(lineno, col, "section", words[0], tuple(words[1:]), tuple(cols[1:]),
                body[pos:].rstrip(), pos + 1, comment)


def payload_pairs(line: Line, source=None) -> dict[str, tuple[str, int]]:
    """Read ``name = value`` pairs from a section payload.

    Values are bracketed (balanced) or a run of non-space characters.
    """
    text, base = line.value, line.value_column
    out: dict[str, tuple[str, int]] = {}
    i = 0
    while i < len(text):
        if text[i] in " \t":
            i += 1
            continue
        m = _KEY.match(text, i)
        if not m:
            raise line.error("expected name = value", base + i, ("name",), source)
        name = m.group()
        j = m.end()
        while j < len(text) and text[j] in " \t":
            j += 1
        if j >= len(text) or text[j] != "=":
            raise line.error(f"expected '=' after {name!r}", base + j, ("=",), source)
        j += 1
        while j < len(text) and text[j] in " \t":
            j += 1
        if j >= len(text):
            raise line.error(f"missing value for {name!r}", base + j, ("value",), source)
        start = j
        if text[j] == "[":
            depth = 0
            while j < len(text):
                depth += {"[": 1, "]": -1}.get(text[j], 0)
                j += 1
                if depth == 0:
                    break
            if depth:
                raise line.error("unbalanced brackets", base + start, ("]",), source)
        else:
            while j < len(text) and text[j] not in " \t":
                j += 1
        if name in out:
            raise line.error(f"duplicate {name!r}", base + i, (), source)
        out[name] = (text[start:j], base + start)
        i = j
    return out


def parse_int(text: str, line: Line, column: int, source=None) -> int:
    try:
        return int(text)
    except ValueError:
        raise line.error(f"expected an integer, got {text!r}", column, ("integer",), source) from None


def parse_matrix(text: str, nrows: int, ncols: int, line: Line, column: int, source=None) -> Matrix:
    """Read a row-major literal such as ``[[1, 0], [0, 1]]``; ``[]`` is a matrix with no rows."""
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise line.error(f"bad matrix literal: {exc.msg}", column + exc.colno - 1,
                         ("[[int, ...], ...]",), source) from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows) or \
            not all(isinstance(x, int) and not isinstance(x, bool) for r in rows for x in r):
        raise line.error("matrix must be a list of integer rows", column, ("[[int, ...], ...]",), source)
    if nrows == 0 and rows == []:
        return Matrix.zeros(0, ncols)
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        got = f"{len(rows)}x{len(rows[0]) if rows else 0}"
        raise line.error(f"matrix is {got}, expected {nrows}x{ncols}", column,
                         (f"{nrows}x{ncols} matrix",), source)
    return Matrix.of(rows, ncols)


def parse_group(text: str, line: Line, column: int, source=None) -> FgAbGroup:
    try:
        return FgAbGroup.parse(text)
    except ParseError as exc:
        raise ParseError(exc.message, line.lineno, column,
                         exc.expected, source) from None


def format_matrix(m: Matrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in m.rows) + "]"
