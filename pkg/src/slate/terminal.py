"""Curses backend: blit ScreenModels and translate key presses."""

from __future__ import annotations

import curses
import os

from slate.render import ScreenModel, render

# name -> (256-colour index, 8-colour fallback)
COLORS = {
    "black": (0, 0),
    "red": (1, 1),
    "green": (2, 2),
    "yellow": (3, 3),
    "blue": (4, 4),
    "magenta": (5, 5),
    "cyan": (6, 6),
    "white": (7, 7),
    "grey": (244, 7),
    "dark_blue": (18, 4),
    "light_blue": (117, 6),
}

_SPECIAL = {
    curses.KEY_UP: "UP",
    curses.KEY_DOWN: "DOWN",
    curses.KEY_LEFT: "LEFT",
    curses.KEY_RIGHT: "RIGHT",
    curses.KEY_SR: "S-UP",
    curses.KEY_SF: "S-DOWN",
    curses.KEY_SLEFT: "S-LEFT",
    curses.KEY_SRIGHT: "S-RIGHT",
    curses.KEY_BACKSPACE: "BACKSPACE",
    curses.KEY_DC: "DELETE",
    curses.KEY_ENTER: "ENTER",
    curses.KEY_HOME: "HOME",
    curses.KEY_END: "END",
    curses.KEY_PPAGE: "PGUP",
    curses.KEY_NPAGE: "PGDN",
    curses.KEY_RESIZE: "RESIZE",
}

# xterm-style modified arrows arrive as extended capabilities
_KEYNAMES = {b"kUP2": "S-UP", b"kDN2": "S-DOWN", b"kLFT2": "S-LEFT", b"kRIT2": "S-RIGHT"}

_CHARS = {" ": "SPACE", "\t": "TAB", "\n": "ENTER", "\r": "ENTER", "\x1b": "ESC", "\x7f": "BACKSPACE", "\b": "BACKSPACE"}


def key_name(key) -> str | None:
    """Key name for a value returned by ``get_wch``."""
    if isinstance(key, str):
        if key in _CHARS:
            return _CHARS[key]
        return key if key.isprintable() else None
    if key in _SPECIAL:
        return _SPECIAL[key]
    try:
        return _KEYNAMES.get(curses.keyname(key))
    except ValueError:
        return None


class Terminal:
    def __init__(self, stdscr):
        self.stdscr = stdscr
        self.pairs: dict[tuple[str, str], int] = {}
        self.has_colors = curses.has_colors()
        if self.has_colors:
            curses.start_color()
            try:
                curses.use_default_colors()
            except curses.error:
                pass
        try:
            curses.curs_set(0)
        except curses.error:
            pass
        stdscr.keypad(True)

    def _color(self, name: str) -> int:
        if name == "default":
            return -1
        full, basic = COLORS.get(name, (7, 7))
        return full if curses.COLORS >= 256 else basic

    def attr(self, fg: str, bg: str, underline: bool) -> int:
        attr = curses.A_UNDERLINE if underline else 0
        if not self.has_colors or (fg, bg) == ("default", "default"):
            return attr
        pair = self.pairs.get((fg, bg))
        if pair is None:
            pair = len(self.pairs) + 1
            if pair >= curses.COLOR_PAIRS:
                return attr | curses.A_REVERSE
            try:
                curses.init_pair(pair, self._color(fg), self._color(bg))
            except curses.error:
                return attr | curses.A_REVERSE
            self.pairs[(fg, bg)] = pair
        return attr | curses.color_pair(pair)

    def draw(self, screen: ScreenModel) -> None:
        self.stdscr.erase()
        for r, row in enumerate(screen.cells):
            for c, cell in enumerate(row):
                if not cell.glyph:
                    continue
                try:
                    self.stdscr.addstr(r, c, cell.glyph, self.attr(cell.fg, cell.bg, cell.underline))
                except curses.error:
                    # writing the bottom-right cell moves the cursor off-screen
                    pass
        self.stdscr.refresh()

    def read_key(self) -> str | None:
        try:
            return key_name(self.stdscr.get_wch())
        except curses.error:
            return None


def _loop(stdscr, session) -> None:
    term = Terminal(stdscr)
    while not session.finished:
        rows, cols = stdscr.getmaxyx()
        screen = render(session, (rows, cols))
        session.current.scroll = screen.scroll
        term.draw(screen)
        key = term.read_key()
        if key is None or key == "RESIZE":
            continue
        session.handle_key(key)


def run(session) -> None:
    os.environ.setdefault("ESCDELAY", "25")
    curses.wrapper(_loop, session)
