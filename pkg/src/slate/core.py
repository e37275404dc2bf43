"""Documents, positions and spans.

A document is a list of lines, each split into whitespace-delimited tokens.
Items are addressed by tuples of integers whose length gives the scope:
``()`` is the whole document, ``(L,)`` a line, ``(L, T)`` a token and
``(L, T, C)`` a character, with characters numbered within their token.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator

_TOKEN_RE = re.compile(r"\S+")


class AddressError(IndexError):
    """A position does not address an item of the document."""


class ScopeError(ValueError):
    """Two positions that must share a scope do not."""


class Scope(enum.IntEnum):
    # value is the arity of the index tuple
    DOCUMENT = 0
    LINE = 1
    TOKEN = 2
    CHARACTER = 3

    @property
    def label(self) -> str:
        return _SCOPE_NAMES[self]

    @classmethod
    def from_name(cls, name: str) -> "Scope":
        for scope, label in _SCOPE_NAMES.items():
            if name == label or name == scope.name.lower():
                return scope
        raise ValueError(f"unknown scope {name!r}")


_SCOPE_NAMES = {
    Scope.DOCUMENT: "doc",
    Scope.LINE: "line",
    Scope.TOKEN: "token",
    Scope.CHARACTER: "char",
}


class Position(tuple):
    """Tuple of non-negative indices; comparison is document order."""

    __slots__ = ()

    def __new__(cls, *indices: int) -> "Position":
        if len(indices) > 3:
            raise ValueError(f"too many indices: {indices}")
        for i in indices:
            if not isinstance(i, int) or isinstance(i, bool) or i < 0:
                raise ValueError(f"indices must be non-negative ints: {indices}")
        return super().__new__(cls, indices)

    def __getnewargs__(self):
        return tuple(self)

    @property
    def scope(self) -> Scope:
        return Scope(len(self))

    def __repr__(self) -> str:
        return "(" + ",".join(str(i) for i in self) + ")"

    __str__ = __repr__


@dataclass(frozen=True, order=True)
class Span:
    """Inclusive run of items from ``start`` to ``end`` at one scope."""

    start: Position
    end: Position

    def __post_init__(self):
        if not isinstance(self.start, Position):
            object.__setattr__(self, "start", Position(*self.start))
        if not isinstance(self.end, Position):
            object.__setattr__(self, "end", Position(*self.end))
        if len(self.start) != len(self.end):
            raise ScopeError(f"span endpoints differ in scope: {self.start} {self.end}")
        if self.end < self.start:
            raise ValueError(f"span end precedes start: {self.start} {self.end}")

    @classmethod
    def single(cls, pos) -> "Span":
        return cls(pos, pos)

    @property
    def scope(self) -> Scope:
        return self.start.scope

    def contains(self, pos) -> bool:
        """True if ``pos`` lies in the span.

        A finer-grained position is contained when its prefix at the span's
        scope is, so a line span contains every token on those lines.
        """
        n = len(self.start)
        if len(pos) < n:
            return False
        head = tuple(pos[:n])
        return self.start <= head <= self.end

    def __repr__(self) -> str:
        if self.start == self.end:
            return repr(self.start)
        return f"{self.start!r}-{self.end!r}"

    __str__ = __repr__


@dataclass(frozen=True)
class Token:
    start: int
    end: int
    text: str

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Line:
    text: str
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class Document:
    lines: tuple[Line, ...]

    def __len__(self) -> int:
        return len(self.lines)

    def token(self, line: int, index: int) -> Token:
        return self.lines[line].tokens[index]

    def count(self, scope: Scope) -> int:
        if scope == Scope.DOCUMENT:
            return 1
        if scope == Scope.LINE:
            return len(self.lines)
        if scope == Scope.TOKEN:
            return sum(len(line.tokens) for line in self.lines)
        return sum(len(tok) for line in self.lines for tok in line.tokens)

    def items(self, scope: Scope) -> Iterator[Position]:
        """Every item at ``scope`` in document order."""
        if scope == Scope.DOCUMENT:
            yield Position()
            return
        for li, line in enumerate(self.lines):
            if scope == Scope.LINE:
                yield Position(li)
                continue
            for ti, tok in enumerate(line.tokens):
                if scope == Scope.TOKEN:
                    yield Position(li, ti)
                else:
                    for ci in range(len(tok)):
                        yield Position(li, ti, ci)

    def is_valid(self, pos) -> bool:
        n = len(pos)
        if n == 0:
            return True
        if pos[0] >= len(self.lines):
            return False
        if n == 1:
            return True
        tokens = self.lines[pos[0]].tokens
        if pos[1] >= len(tokens):
            return False
        return n == 2 or pos[2] < len(tokens[pos[1]])

    def validate(self, pos) -> Position:
        if not isinstance(pos, Position):
            try:
                pos = Position(*pos)
            except ValueError as err:
                raise AddressError(str(err)) from None
        if not self.is_valid(pos):
            raise AddressError(f"position {pos} is out of range")
        return pos

    def first(self, scope: Scope) -> Position | None:
        return next(self.items(scope), None)

    def columns(self, pos) -> tuple[int, int, int]:
        """(line, start column, end column) of the raw text an item covers."""
        if len(pos) == 0:
            last = len(self.lines) - 1
            return 0, 0, len(self.lines[last].text)
        line = self.lines[pos[0]]
        if len(pos) == 1:
            return pos[0], 0, len(line.text)
        tok = line.tokens[pos[1]]
        if len(pos) == 2:
            return pos[0], tok.start, tok.end
        col = tok.start + pos[2]
        return pos[0], col, col + 1


def tokenize(text: str) -> Document:
    """Split ``text`` into lines on LF and lines into whitespace-free tokens.

    One trailing newline is treated as a terminator, not as an extra empty
    line; a trailing CR on each line is dropped.  Empty input gives a single
    empty line.
    """
    if text.endswith("\n"):
        text = text[:-1]
    lines = []
    for raw in text.split("\n"):
        if raw.endswith("\r"):
            raw = raw[:-1]
        tokens = tuple(Token(m.start(), m.end(), m.group()) for m in _TOKEN_RE.finditer(raw))
        lines.append(Line(raw, tokens))
    return Document(tuple(lines))


def normalize_span(a, b) -> Span:
    a, b = Position(*a), Position(*b)
    if len(a) != len(b):
        raise ScopeError(f"cannot span {a} and {b}: scopes differ")
    return Span(min(a, b), max(a, b))


def items_in(doc: Document, span: Span) -> list[Position]:
    start, end = doc.validate(span.start), doc.validate(span.end)
    scope = start.scope
    if scope == Scope.DOCUMENT:
        return [Position()]
    if scope == Scope.LINE:
        return [Position(i) for i in range(start[0], end[0] + 1)]
    out = []
    for li in range(start[0], end[0] + 1):
        tokens = doc.lines[li].tokens
        for ti, tok in enumerate(tokens):
            if scope == Scope.TOKEN:
                p = Position(li, ti)
                if start <= p <= end:
                    out.append(p)
            else:
                if (li, ti) < start[:2] or (li, ti) > end[:2]:
                    continue
                for ci in range(len(tok)):
                    p = Position(li, ti, ci)
                    if start <= p <= end:
                        out.append(p)
    return out


def _tokened_line(doc: Document, line: int, step: int) -> int | None:
    line += step
    while 0 <= line < len(doc.lines):
        if doc.lines[line].tokens:
            return line
        line += step
    return None


def next_item(doc: Document, pos, direction: str) -> Position:
    """The adjacent item in ``direction`` (left/right/up/down).

    Left and right follow document order, crossing line ends (empty lines
    hold no tokens and are skipped).  Up and down keep the ordinal index
    on the nearest line that has items, clamped to its last item.  At a
    boundary the position is returned unchanged.
    """
    pos = doc.validate(pos)
    if direction not in ("left", "right", "up", "down"):
        raise ValueError(f"unknown direction {direction!r}")
    scope = pos.scope
    if scope == Scope.DOCUMENT:
        return pos
    forward = direction in ("right", "down")
    step = 1 if forward else -1
    if scope == Scope.LINE:
        li = pos[0] + step
        return Position(li) if 0 <= li < len(doc.lines) else pos

    li, ti = pos[0], pos[1]
    if direction in ("up", "down"):
        target = _tokened_line(doc, li, step)
        if target is None:
            return pos
        tokens = doc.lines[target].tokens
        ti = min(ti, len(tokens) - 1)
        if scope == Scope.TOKEN:
            return Position(target, ti)
        return Position(target, ti, min(pos[2], len(tokens[ti]) - 1))

    tokens = doc.lines[li].tokens
    if scope == Scope.CHARACTER:
        ci = pos[2] + step
        if 0 <= ci < len(tokens[ti]):
            return Position(li, ti, ci)
    ti += step
    if not 0 <= ti < len(tokens):
        target = _tokened_line(doc, li, step)
        if target is None:
            return pos
        li = target
        tokens = doc.lines[li].tokens
        ti = 0 if forward else len(tokens) - 1
    if scope == Scope.TOKEN:
        return Position(li, ti)
    return Position(li, ti, 0 if forward else len(tokens[ti]) - 1)


def locate_column(doc: Document, line: int, column: int, scope: Scope) -> Position | None:
    """The item holding raw-text ``column`` of ``line``, or the next token
    on that line when the column falls in whitespace."""
    if scope == Scope.DOCUMENT:
        return Position()
    if scope == Scope.LINE:
        return Position(line)
    for ti, tok in enumerate(doc.lines[line].tokens):
        if tok.end > column:
            if scope == Scope.TOKEN:
                return Position(line, ti)
            return Position(line, ti, max(0, column - tok.start))
    return None
