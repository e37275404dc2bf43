"""Pure rendering of a session to a grid of styled cells.

Nothing here touches a terminal: ``render`` returns a ScreenModel that the
curses backend blits and tests compare against golden dumps.
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, field
from typing import NamedTuple

from slate.config import format_keyseq
from slate.core import Document, Position, Scope, Span, items_in
from slate.session import describe_item
from slate.store import Kind

MIN_ROWS = 2
MIN_COLS = 10
ELLIPSIS = "…"
_WORD_RE = re.compile(r"\S+")


class StyleClass(enum.Enum):
    PLAIN = "plain"
    LABEL = "label"
    MULTI_LABEL = "multi_label"
    HAS_TEXT = "has_text"
    LINK_SOURCE = "link_source"
    LINK_TARGET = "link_target"
    HAS_LINK = "has_link"
    ADJ_CURRENT = "adj_current"
    ADJ_AGREED = "adj_agreed"
    ADJ_DISPUTED_HERE = "adj_disputed_here"
    ADJ_DISPUTED_ELSEWHERE = "adj_disputed_elsewhere"


# Background colour for every situation; label colours come from the config.
STYLE_COLORS = {
    StyleClass.PLAIN: "default",
    StyleClass.MULTI_LABEL: "grey",
    StyleClass.HAS_TEXT: "yellow",
    StyleClass.LINK_SOURCE: "green",
    StyleClass.LINK_TARGET: "light_blue",
    StyleClass.HAS_LINK: "dark_blue",
    StyleClass.ADJ_CURRENT: "green",
    StyleClass.ADJ_AGREED: "dark_blue",
    StyleClass.ADJ_DISPUTED_HERE: "light_blue",
    StyleClass.ADJ_DISPUTED_ELSEWHERE: "red",
}

_DARK = {"black", "blue", "dark_blue", "red", "magenta"}


def foreground_for(background: str) -> str:
    if background == "default":
        return "default"
    return "white" if background in _DARK else "black"


class Style(NamedTuple):
    cls: StyleClass
    label: str | None = None
    underline: bool = False


@dataclass(frozen=True)
class Cell:
    glyph: str = " "
    fg: str = "default"
    bg: str = "default"
    underline: bool = False


BLANK = Cell()


@dataclass
class ScreenModel:
    rows: int
    cols: int
    cells: list = field(default_factory=list)
    source: list = field(default_factory=list)
    cursor: tuple[int, int] = (0, 0)
    scroll: int = 0

    @classmethod
    def blank(cls, rows: int, cols: int) -> "ScreenModel":
        return cls(
            rows,
            cols,
            [[BLANK] * cols for _ in range(rows)],
            [[None] * cols for _ in range(rows)],
        )

    def put(self, row: int, col: int, cell: Cell, source=None) -> None:
        self.cells[row][col] = cell
        self.source[row][col] = source

    def row_text(self, row: int) -> str:
        return "".join(c.glyph for c in self.cells[row])

    def text(self) -> str:
        return "\n".join(self.row_text(r) for r in range(self.rows))

    def dump(self) -> str:
        """Stable text form: glyph rows, then the styled runs of each row."""
        out = [f"size {self.rows}x{self.cols} cursor {self.cursor[0]},{self.cursor[1]}"]
        for r in range(self.rows):
            out.append("|" + self.row_text(r) + "|")
        for r in range(self.rows):
            runs = []
            row = self.cells[r]
            c = 0
            while c < self.cols:
                cell = row[c]
                key = (cell.fg, cell.bg, cell.underline)
                if key == ("default", "default", False):
                    c += 1
                    continue
                end = c
                while end + 1 < self.cols and (row[end + 1].fg, row[end + 1].bg, row[end + 1].underline) == key:
                    end += 1
                runs.append(f"{c}-{end} {cell.fg}/{cell.bg}{' u' if cell.underline else ''}")
                c = end + 1
            if runs:
                out.append(f"{r}: " + "; ".join(runs))
        return "\n".join(out) + "\n"


def char_width(ch: str) -> int:
    if unicodedata.combining(ch) or unicodedata.category(ch) in ("Mn", "Me"):
        return 0
    if unicodedata.east_asian_width(ch) in ("W", "F"):
        return 2
    return 1


def display_width(text: str) -> int:
    return sum(char_width(ch) for ch in text)


def truncate(text: str, width: int) -> str:
    if display_width(text) <= width:
        return text
    out, used = [], 0
    for ch in text:
        w = char_width(ch)
        if used + w > width - 1:
            break
        out.append(ch)
        used += w
    return "".join(out) + ELLIPSIS


# -- styles --------------------------------------------------------------


def _overlaps(a: Span, b: Span) -> bool:
    if a.scope != b.scope:
        return False
    return not (a.end < b.start or b.end < a.start)


class _Index:
    """Set of positions; membership also holds for finer positions whose
    prefix is a member."""

    def __init__(self):
        self.members: dict[Position, list] = {}

    def add(self, pos, value=None) -> None:
        self.members.setdefault(Position(*pos), []).append(value)

    def get(self, item) -> list:
        out = []
        for k in range(len(item) + 1):
            out.extend(self.members.get(item[:k] if k < len(item) else item, ()))
        return out

    def __contains__(self, item) -> bool:
        return any((item[:k] if k < len(item) else item) in self.members for k in range(len(item) + 1))


class StyleContext:
    """Precomputed lookups so styling an item is cheap."""

    def __init__(self, doc: Document, store, *, kind: Kind, mode: str, selection: Span | None,
                 anchor: Span | None = None, adjudication=None):
        self.doc = doc
        self.kind = kind
        self.adjudicating = mode == "adjudicate" and adjudication is not None
        self.selection = selection
        self.labels = _Index()
        self.texts = _Index()
        self.links = _Index()
        self.current = _Index()
        self.near = _Index()  # linked to current: value "agreed"/"disputed"/None
        self.disputed = _Index()

        current = anchor if anchor is not None else selection
        if current is not None:
            for p in items_in(doc, current):
                self.current.add(p)
        for ann in store:
            if ann.kind is Kind.LABEL:
                for p in items_in(doc, ann.span):
                    self.labels.add(p, ann.value)
            elif ann.kind is Kind.TEXT:
                for p in items_in(doc, ann.span):
                    self.texts.add(p)
            else:
                for span in ann.spans:
                    for p in items_in(doc, span):
                        self.links.add(p)
                if current is not None and _overlaps(ann.span, current):
                    for p in items_in(doc, ann.value):
                        self.near.add(p, "agreed")
        if self.adjudicating:
            for p in adjudication.unresolved():
                self.disputed.add(p)
            if current is not None:
                for ann in adjudication.disputed:
                    if ann.kind is Kind.LINK and ann not in store and _overlaps(ann.span, current):
                        for p in items_in(doc, ann.value):
                            self.near.add(p, "disputed")

    def style(self, item) -> Style:
        underline = self.selection is not None and self.selection.contains(item)
        return Style(*self._background(item), underline)

    def _background(self, item) -> tuple[StyleClass, str | None]:
        if self.kind is Kind.LINK:
            if item in self.current:
                return (StyleClass.ADJ_CURRENT if self.adjudicating else StyleClass.LINK_SOURCE), None
            near = self.near.get(item)
            if self.adjudicating:
                if "agreed" in near:
                    return StyleClass.ADJ_AGREED, None
                if "disputed" in near:
                    return StyleClass.ADJ_DISPUTED_HERE, None
                if item in self.disputed:
                    return StyleClass.ADJ_DISPUTED_ELSEWHERE, None
                return StyleClass.PLAIN, None
            if near:
                return StyleClass.LINK_TARGET, None
            if item in self.links:
                return StyleClass.HAS_LINK, None
            return StyleClass.PLAIN, None
        if self.adjudicating and item in self.disputed:
            return StyleClass.ADJ_DISPUTED_ELSEWHERE, None
        names = sorted(set(self.labels.get(item)))
        if len(names) >= 2:
            return StyleClass.MULTI_LABEL, None
        if names:
            return StyleClass.LABEL, names[0]
        if item in self.texts:
            return StyleClass.HAS_TEXT, None
        return StyleClass.PLAIN, None


def context_for(session) -> StyleContext:
    return StyleContext(
        session.doc,
        session.store,
        kind=session.kind,
        mode=session.mode,
        selection=session.selection,
        anchor=session.anchor,
        adjudication=session.adjudication,
    )


def style_for_item(item, session) -> Style:
    return context_for(session).style(Position(*item))


def style_colors(style: Style, config) -> tuple[str, str]:
    if style.cls is StyleClass.LABEL:
        bg = config.label_color(style.label)
    else:
        bg = STYLE_COLORS[style.cls]
    return foreground_for(bg), bg


# -- legend --------------------------------------------------------------


def legend_entries(labels) -> list[str]:
    return [f"{format_keyseq(spec.keys)}:{spec.name}" for spec in labels]


def pack_legend(entries: list[str], width: int) -> list[list[int]]:
    """Greedy first-fit packing of entry indices into rows."""
    if not entries:
        return []
    if width < max(display_width(e) for e in entries):
        return [[i] for i in range(len(entries))]
    rows: list[list[int]] = [[]]
    used = 0
    for i, entry in enumerate(entries):
        w = display_width(entry)
        need = w + (1 if rows[-1] else 0)
        if rows[-1] and used + need > width:
            rows.append([])
            used, need = 0, w
        rows[-1].append(i)
        used += need
    return rows


def layout_legend(labels, width: int) -> list[str]:
    entries = legend_entries(labels)
    return [" ".join(truncate(entries[i], width) for i in row) for row in pack_legend(entries, width)]


# -- document layout -----------------------------------------------------


def _line_items(doc: Document, li: int, scope: Scope) -> list:
    """Item owning each column of line ``li`` (None for whitespace)."""
    text = doc.lines[li].text
    if scope == Scope.DOCUMENT:
        return [Position()] * len(text)
    if scope == Scope.LINE:
        return [Position(li)] * len(text)
    owner = [None] * len(text)
    for ti, tok in enumerate(doc.lines[li].tokens):
        for c in range(tok.start, tok.end):
            owner[c] = Position(li, ti) if scope == Scope.TOKEN else Position(li, ti, c - tok.start)
    return owner


def _wrap_line(text: str, width: int) -> list[list[tuple[str, int | None, int]]]:
    """Split a line into display rows of (glyph, source column, cells)."""
    rows: list[list] = [[]]
    used = 0
    word_width = {}
    for m in _WORD_RE.finditer(text):
        word_width[m.start()] = display_width(m.group())
    for col, ch in enumerate(text):
        ww = word_width.get(col)
        if ww is not None and used and used + ww > width >= ww:
            rows.append([])
            used = 0
        w = char_width(ch)
        if w == 0 and rows[-1]:
            glyph, src, cw = rows[-1][-1]
            rows[-1][-1] = (glyph + ch, src, cw)
            continue
        w = max(w, 1)
        if ch.isspace():
            ch = " "
        elif not ch.isprintable():
            ch, w = "?", 1
        if used + w > width:
            rows.append([])
            used = 0
        rows[-1].append((ch, col, w))
        used += w
    return rows


def render(session, size: tuple[int, int]) -> ScreenModel:
    rows, cols = size
    if rows < MIN_ROWS or cols < MIN_COLS:
        screen = ScreenModel.blank(max(rows, 0), max(cols, 0))
        for c, ch in enumerate("Terminal too small"[: max(cols, 0)]):
            if rows > 0:
                screen.put(0, c, Cell(ch))
        return screen

    screen = ScreenModel.blank(rows, cols)
    config = session.config
    view = session.view
    doc = session.doc
    f = session.current

    panels: list[list[tuple[str, str, str]]] = []  # rows of (text, fg, bg) segments
    if view.current_item:
        panels.append([(truncate(describe_item(session), cols), "black", "white")])
    if view.progress:
        j, m = session.item_ordinal()
        line = f"file {session.index + 1}/{len(session.files)}, item {j}/{m}"
        if session.adjudication is not None:
            line += f", unresolved {len(session.adjudication.unresolved())}"
        panels.append([(truncate(line, cols), "black", "white")])
    legend_rows = []
    if view.legend:
        entries = legend_entries(config.labels)
        for row in pack_legend(entries, cols):
            segs = []
            for k, i in enumerate(row):
                if k:
                    segs.append((" ", "default", "default"))
                bg = config.labels[i].color
                segs.append((truncate(entries[i], cols), foreground_for(bg), bg))
            legend_rows.append(segs)
    status = _status_line(session)
    status_rows = [[(truncate(status, cols), "default", "default")]] if status else []

    # keep at least one row for the document
    budget = rows - 1
    status_rows = status_rows[:budget]
    budget -= len(status_rows)
    panels = panels[:budget]
    budget -= len(panels)
    legend_rows = legend_rows[:budget]
    bottom = panels + legend_rows + status_rows
    text_rows = rows - len(bottom)

    for r, segs in enumerate(bottom, start=text_rows):
        c = 0
        for text, fg, bg in segs:
            for ch in text:
                w = char_width(ch)
                if w == 0 and c > 0:
                    prev = screen.cells[r][c - 1]
                    screen.cells[r][c - 1] = Cell(prev.glyph + ch, prev.fg, prev.bg)
                    continue
                if c + max(w, 1) > cols:
                    break
                screen.put(r, c, Cell(ch, fg, bg))
                for extra in range(1, w):
                    screen.put(r, c + extra, Cell("", fg, bg))
                c += max(w, 1)

    gutter = len(str(len(doc.lines) - 1)) + 1 if view.line_numbers else 0
    if cols - gutter < 2:
        gutter = 0
    width = cols - gutter

    layouts: dict[int, list] = {}

    def layout(li: int) -> list:
        if li not in layouts:
            layouts[li] = _wrap_line(doc.lines[li].text, width)
        return layouts[li]

    cursor = session.cursor
    cursor_line = cursor[0] if cursor is not None and len(cursor) >= 1 else None
    # the cursor goes on the last cell starting at or before its column, so
    # an item hidden inside a combined glyph still gets a cursor
    cursor_col = doc.columns(cursor)[1] if cursor_line is not None else -1
    scroll = min(max(f.scroll, 0), len(doc.lines) - 1)
    if cursor_line is not None:
        if cursor_line < scroll:
            scroll = cursor_line
        while scroll < cursor_line and sum(len(layout(li)) for li in range(scroll, cursor_line + 1)) > text_rows:
            scroll += 1
    screen.scroll = scroll
    # a wrapped line taller than the text area: drop its leading rows
    skip = 0
    if cursor_line is not None and cursor_line == scroll:
        k = 0
        for i, drow in enumerate(layout(scroll)):
            if drow and drow[0][1] <= cursor_col:
                k = i
        skip = max(0, k - text_rows + 1)

    ctx = context_for(session)
    styles: dict = {}

    def style_of(item) -> tuple[str, str, bool]:
        if item not in styles:
            st = ctx.style(item)
            fg, bg = style_colors(st, config)
            styles[item] = (fg, bg, st.underline)
        return styles[item]

    cursor_at = None
    r = 0
    li = scroll
    while r < text_rows and li < len(doc.lines):
        owners = _line_items(doc, li, session.scope)
        for k, drow in enumerate(layout(li)):
            if li == scroll and k < skip:
                continue
            if r >= text_rows:
                break
            if gutter and k == (skip if li == scroll else 0):
                for c, ch in enumerate(str(li).rjust(gutter - 1)):
                    screen.put(r, c, Cell(ch, "default", "default"))
            if not drow and session.scope in (Scope.LINE, Scope.DOCUMENT):
                item = Position(li) if session.scope == Scope.LINE else Position()
                fg, bg, ul = style_of(item)
                screen.put(r, gutter, Cell(" ", fg, bg, ul))
                if cursor_at is None and item == cursor:
                    cursor_at = (r, gutter, -1)
            c = gutter
            for glyph, col, w in drow:
                item = owners[col]
                fg, bg, ul = style_of(item) if item is not None else ("default", "default", False)
                screen.put(r, c, Cell(glyph, fg, bg, ul), (li, col))
                for extra in range(1, w):
                    screen.put(r, c + extra, Cell("", fg, bg, ul))
                if li == cursor_line and col <= cursor_col and (cursor_at is None or cursor_at[2] < col):
                    cursor_at = (r, c, col)
                c += w
            r += 1
        li += 1
    screen.cursor = cursor_at[:2] if cursor_at is not None else (0, gutter)
    if session.prompt is not None and status_rows:
        screen.cursor = (rows - 1, min(cols - 1, display_width(status)))
    return screen


def _status_line(session) -> str:
    if session.prompt is not None:
        return session.prompt.title + session.prompt.buffer
    if session.decoder.pending:
        return format_keyseq(session.decoder.pending)
    return session.status
