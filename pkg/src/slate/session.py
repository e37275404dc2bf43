"""Headless command engine.

A Session owns the open files, the cursor and selection of each, the view
toggles and any pending prompt.  Feed it keys (``handle_key``) or decoded
commands (``execute``); the terminal layer only renders its state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from slate import standoff
from slate.adjudication import Adjudication, RejectAll
from slate.config import Command, Config, KeyDecoder, Pending, Unbound, default_config, format_keyseq
from slate.core import Document, Position, Scope, Span, locate_column, next_item
from slate.store import Annotation, AnnotationStore, Kind

log = logging.getLogger(__name__)

ANNOTATE = "annotate"
ADJUDICATE = "adjudicate"

REPEATABLE = frozenset(
    {
        "move_up", "move_down", "move_left", "move_right",
        "extend_up", "extend_down", "extend_left", "extend_right",
        "contract_up", "contract_down", "contract_left", "contract_right",
        "undo", "search_next", "search_prev", "next_file", "prev_file",
        "next_disagreement",
    }
)


class SaveError(OSError):
    def __init__(self, failures: dict):
        self.failures = failures
        super().__init__("could not save " + ", ".join(f"{p} ({e})" for p, e in failures.items()))


@dataclass
class ViewState:
    legend: bool = False
    line_numbers: bool = False
    current_item: bool = False
    progress: bool = False

    def as_tuple(self) -> tuple:
        return (self.legend, self.line_numbers, self.current_item, self.progress)


@dataclass
class Prompt:
    purpose: str  # "text" or "search"
    buffer: str = ""
    direction: int = 1

    @property
    def title(self) -> str:
        if self.purpose == "text":
            return "Text: "
        return "/" if self.direction > 0 else "?"


class FileState:
    """One document with its store and the per-file cursor."""

    def __init__(self, path, doc: Document, store: AnnotationStore, scope: Scope, *,
                 output=None, adjudication: Adjudication | None = None, on_disk: bool = True):
        self.path = Path(path)
        self.doc = doc
        self.adjudication = adjudication
        self.store = adjudication.resolution if adjudication is not None else store
        self.output = Path(output) if output is not None else standoff.annotation_path(path, adjudicated=adjudication is not None)
        self.cursor: Position | None = doc.first(scope)
        self.selection: Span | None = Span.single(self.cursor) if self.cursor is not None else None
        self.anchor: Span | None = None
        self.scroll = 0
        self.saved = self.store.snapshot()
        # an adjudication output must be written even when it equals the agreed core
        self.unwritten = not on_disk

    @property
    def dirty(self) -> bool:
        return self.unwritten or self.store.snapshot() != self.saved

    def state(self) -> tuple:
        return (self.cursor, self.selection, self.anchor, self.store.snapshot(),
                frozenset(self.adjudication.resolved_items) if self.adjudication else None)


class Session:
    def __init__(self, files: Iterable[FileState], config: Config | None = None, *,
                 kind: Kind = Kind.LABEL, scope: Scope = Scope.TOKEN, mode: str = ANNOTATE):
        self.files = list(files)
        if not self.files:
            raise ValueError("a session needs at least one file")
        self.config = config or default_config()
        self.kind = Kind(kind)
        self.scope = scope
        self.mode = mode
        self.index = 0
        self.view = ViewState(**self.config.view)
        self.decoder = KeyDecoder(self.config)
        self.prompt: Prompt | None = None
        self.status = ""
        self.query: str | None = None
        self.search_direction = 1
        self.finished = False
        self._quit_armed = False

    @classmethod
    def from_texts(cls, texts, config=None, *, kind=Kind.LABEL, scope=Scope.TOKEN, names=None):
        """Convenience constructor over in-memory texts (tests, scripts)."""
        from slate.core import tokenize

        files = []
        for i, text in enumerate(texts):
            name = names[i] if names else f"file{i}.txt"
            files.append(FileState(name, tokenize(text), AnnotationStore(), scope))
        return cls(files, config, kind=kind, scope=scope)

    # -- accessors -------------------------------------------------------

    @property
    def current(self) -> FileState:
        return self.files[self.index]

    @property
    def doc(self) -> Document:
        return self.current.doc

    @property
    def store(self) -> AnnotationStore:
        return self.current.store

    @property
    def cursor(self) -> Position | None:
        return self.current.cursor

    @property
    def selection(self) -> Span | None:
        return self.current.selection

    @property
    def anchor(self) -> Span | None:
        return self.current.anchor

    @property
    def adjudication(self) -> Adjudication | None:
        return self.current.adjudication

    @property
    def dirty(self) -> bool:
        return any(f.dirty for f in self.files)

    def snapshot(self) -> tuple:
        """Hashable summary of everything commands can change."""
        return (self.index, tuple(f.state() for f in self.files), self.view.as_tuple())

    def item_ordinal(self) -> tuple[int, int]:
        """(1-based index of the cursor item, item count) for progress."""
        total = self.doc.count(self.scope)
        if self.cursor is None:
            return 0, total
        for i, pos in enumerate(self.doc.items(self.scope), start=1):
            if pos == self.cursor:
                return i, total
        return 0, total

    # -- input -----------------------------------------------------------

    def feed(self, keys: Iterable[str]) -> None:
        for key in keys:
            if self.finished:
                break
            self.handle_key(key)

    def handle_key(self, key: str) -> None:
        if self.prompt is not None:
            self._prompt_key(key)
            return
        result = self.decoder.feed(key)
        if isinstance(result, Command):
            self.execute(result)
        elif isinstance(result, Pending):
            self.status = format_keyseq(result.keys)
        elif isinstance(result, Unbound):
            self.status = f"{format_keyseq(result.keys)} is not bound"

    def _prompt_key(self, key: str) -> None:
        prompt = self.prompt
        if key == "ENTER":
            self.prompt = None
            if prompt.purpose == "text":
                self._set_text(prompt.buffer)
            elif prompt.buffer:
                self.query = prompt.buffer
                self.search_direction = prompt.direction
                self._do_search(prompt.direction)
        elif key == "ESC":
            self.prompt = None
            self.status = "Cancelled"
        elif key in ("BACKSPACE", "DELETE"):
            prompt.buffer = prompt.buffer[:-1]
        elif key == "SPACE":
            prompt.buffer += " "
        elif key == "TAB":
            prompt.buffer += "\t"
        elif len(key) == 1:
            prompt.buffer += key

    # -- commands --------------------------------------------------------

    def execute(self, command: Command) -> None:
        action = command.action
        handler = getattr(self, "_cmd_" + action, None)
        if handler is None:
            raise RuntimeError(f"unknown action {action!r}")
        if action != "quit":
            self._quit_armed = False
        self.status = ""
        times = command.repeat if action in REPEATABLE else 1
        for _ in range(times):
            if command.arg is None:
                handler()
            else:
                handler(command.arg)

    def run(self, action: str, repeat: int = 1, arg=None) -> None:
        self.execute(Command(action, repeat, arg))

    def _move(self, direction: str) -> None:
        f = self.current
        if f.cursor is None:
            return
        f.cursor = next_item(f.doc, f.cursor, direction)
        f.selection = Span.single(f.cursor)

    def _cmd_move_up(self):
        self._move("up")

    def _cmd_move_down(self):
        self._move("down")

    def _cmd_move_left(self):
        self._move("left")

    def _cmd_move_right(self):
        self._move("right")

    def _resize(self, end: str, direction: str, grow: bool) -> None:
        f = self.current
        if f.selection is None:
            return
        start, stop = f.selection.start, f.selection.end
        if end == "start":
            moved = next_item(f.doc, start, direction)
            start = moved if grow else min(moved, stop)
            cursor = start if grow else max(f.cursor, start)
        else:
            moved = next_item(f.doc, stop, direction)
            stop = moved if grow else max(moved, start)
            cursor = stop if grow else min(f.cursor, stop)
        f.selection = Span(start, stop)
        f.cursor = cursor

    def _cmd_extend_left(self):
        self._resize("start", "left", True)

    def _cmd_extend_up(self):
        self._resize("start", "up", True)

    def _cmd_extend_right(self):
        self._resize("end", "right", True)

    def _cmd_extend_down(self):
        self._resize("end", "down", True)

    def _cmd_contract_left(self):
        self._resize("start", "right", False)

    def _cmd_contract_down(self):
        self._resize("start", "down", False)

    def _cmd_contract_right(self):
        self._resize("end", "left", False)

    def _cmd_contract_up(self):
        self._resize("end", "up", False)

    # annotation

    def _change(self, change) -> None:
        adj = self.adjudication
        if adj is not None:
            adj.edit(change)
        else:
            change(self.store)

    def _cmd_apply_label(self, name: str):
        if self.kind is not Kind.LABEL:
            self.status = "Labels are not being annotated in this run"
            return
        sel = self.selection
        if sel is None:
            return
        ann = Annotation.label(sel, name)
        adj = self.adjudication
        if adj is not None and ann in adj.disputed and ann not in self.store:
            adj.resolve(ann)
        else:
            self._change(lambda store: store.apply_label(sel, name))

    def _cmd_enter_text(self):
        if self.kind is not Kind.TEXT:
            self.status = "Free text is not being annotated in this run"
            return
        if self.selection is None:
            return
        self.prompt = Prompt("text", self.store.text_at(self.selection) or "")

    def _set_text(self, text: str) -> None:
        sel = self.selection
        if sel is not None:
            self._change(lambda store: store.set_text(sel, text))

    def _cmd_toggle_link_anchor(self):
        if self.kind is not Kind.LINK:
            self.status = "Links are not being annotated in this run"
            return
        f = self.current
        f.anchor = None if f.anchor is not None else f.selection

    def _cmd_commit_link(self):
        if self.kind is not Kind.LINK:
            self.status = "Links are not being annotated in this run"
            return
        f = self.current
        if f.anchor is None or f.selection is None:
            self.status = "No link source: press the anchor key first"
            return
        ann = Annotation.link(f.anchor, f.selection)
        adj = self.adjudication
        if adj is not None and ann in adj.disputed and ann not in self.store:
            adj.resolve(ann)
        else:
            source, target = f.anchor, f.selection
            self._change(lambda store: store.toggle_link(source, target))

    def _cmd_undo(self):
        adj = self.adjudication
        done = adj.undo() if adj is not None else self.store.undo() is not None
        if not done:
            self.status = "Nothing to undo"

    def _cmd_reject_all(self):
        adj = self.adjudication
        if adj is None or self.cursor is None:
            self.status = "Not adjudicating"
            return
        if not adj.resolve(RejectAll(self.cursor)):
            self.status = "No disagreement here"

    def _cmd_next_disagreement(self):
        adj = self.adjudication
        if adj is None or self.cursor is None:
            self.status = "Not adjudicating"
            return
        pos = adj.next_disagreement(self.cursor)
        if pos is None:
            self.status = "All disagreements resolved"
            return
        self._jump(pos)

    def _cmd_cancel(self):
        f = self.current
        f.anchor = None
        if f.cursor is not None:
            f.selection = Span.single(f.cursor)
        self.decoder.reset()

    # search

    def _cmd_search_prompt(self):
        self.prompt = Prompt("search", direction=1)

    def _cmd_search_next(self):
        self._repeat_search(self.search_direction)

    def _cmd_search_prev(self):
        self._repeat_search(-self.search_direction)

    def _repeat_search(self, direction: int) -> None:
        if not self.query:
            self.status = "No previous search"
            return
        self._do_search(direction)

    def _do_search(self, direction: int) -> None:
        if self.search(self.query, direction) is None:
            self.status = f"Not found: {self.query}"

    def matches(self, query: str) -> list[Position]:
        """Items holding a match start, in document order.  A match that
        starts in whitespace belongs to the next token on its line."""
        out = []
        for li, line in enumerate(self.doc.lines):
            col = line.text.find(query)
            while col != -1:
                pos = locate_column(self.doc, li, col, self.scope)
                if pos is not None and (not out or out[-1] != pos):
                    out.append(pos)
                col = line.text.find(query, col + 1)
        return out

    def search(self, query: str, direction: int = 1) -> Position | None:
        """Exact, case-sensitive substring search from the cursor with
        wraparound.  Moves the cursor and returns the matched item."""
        if not query:
            raise ValueError("empty query")
        found = self.matches(query)
        if not found:
            return None
        cur = self.cursor
        if direction > 0:
            after = [p for p in found if p > cur]
            pos = after[0] if after else found[0]
        else:
            before = [p for p in found if p < cur]
            pos = before[-1] if before else found[-1]
        self._jump(pos)
        return pos

    def _jump(self, pos: Position) -> None:
        f = self.current
        f.cursor = pos
        f.selection = Span.single(pos)

    # view

    def _cmd_toggle_legend(self):
        self.view.legend = not self.view.legend

    def _cmd_toggle_line_numbers(self):
        self.view.line_numbers = not self.view.line_numbers

    def _cmd_toggle_current_item(self):
        self.view.current_item = not self.view.current_item

    def _cmd_toggle_progress(self):
        self.view.progress = not self.view.progress

    # files

    def _cmd_next_file(self):
        self._switch(1)

    def _cmd_prev_file(self):
        self._switch(-1)

    def _switch(self, step: int) -> None:
        target = self.index + step
        if 0 <= target < len(self.files):
            self.index = target

    def _cmd_save(self):
        try:
            written = self.save()
        except SaveError as err:
            self.status = str(err)
            return
        if written:
            self.status = "Saved " + ", ".join(str(p) for p in written)
        else:
            self.status = "No changes to save"

    def save(self) -> list[Path]:
        written, failures = [], {}
        for f in self.files:
            if not f.dirty:
                continue
            try:
                standoff.save(f.output, f.store)
            except OSError as err:
                failures[f.output] = err
                continue
            f.saved = f.store.snapshot()
            f.unwritten = False
            written.append(f.output)
        if failures:
            raise SaveError(failures)
        return written

    def _cmd_quit(self):
        if self._quit_armed:
            self.finished = True
            return
        reasons = []
        if self.dirty:
            reasons.append("unsaved changes")
        open_disputes = sum(len(f.adjudication.unresolved()) for f in self.files if f.adjudication)
        if open_disputes:
            reasons.append(f"{open_disputes} unresolved items")
        if not reasons:
            self.finished = True
            return
        self._quit_armed = True
        self.status = " and ".join(reasons).capitalize() + ": press quit again to leave anyway"


def describe_item(session: Session) -> str:
    """Text for the current-item info line."""
    cur = session.cursor
    if cur is None:
        return "(no items)"
    sel = session.selection
    parts = [str(sel)]
    adj = session.adjudication
    for ann in session.store.annotations_at(cur):
        parts.append(_describe(ann))
    if adj is not None:
        for ann, who in adj.disputed.items():
            if ann not in session.store and ann.touches(cur):
                parts.append(_describe(ann) + "[" + ",".join(n for n in adj.names if n in who) + "]?")
    if session.anchor is not None:
        parts.append(f"anchor {session.anchor}")
    return " ".join(parts)


def _describe(ann: Annotation) -> str:
    if ann.kind is Kind.LABEL:
        return ann.value
    if ann.kind is Kind.TEXT:
        return repr(ann.value)
    return f"{ann.span}->{ann.value}"
