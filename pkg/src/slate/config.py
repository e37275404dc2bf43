"""Labels, colours and keybindings, read from a small line-oriented file.

Directives, one per line (``#`` starts a comment)::

    label <name> <keys> [<colour>]
    bind <action> <keys>
    show <legend|line_numbers|current_item|progress> <on|off>

``<keys>`` is a ``+``-joined key sequence such as ``SPACE+a``.  Printable
characters name themselves; ``PLUS`` stands for a literal ``+``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Union

DEFAULT_CONFIG_PATH = "slate.config"

NAMED_KEYS = frozenset(
    {
        "SPACE", "TAB", "ENTER", "ESC", "BACKSPACE", "DELETE",
        "UP", "DOWN", "LEFT", "RIGHT",
        "S-UP", "S-DOWN", "S-LEFT", "S-RIGHT",
        "HOME", "END", "PGUP", "PGDN",
    }
)

# base palette, in the order colours are handed to labels without one
PALETTE = ("green", "yellow", "cyan", "magenta", "red", "blue", "white", "black")

MAX_REPEAT = 9999

ACTIONS = frozenset(
    {
        "move_up", "move_down", "move_left", "move_right",
        "extend_up", "extend_down", "extend_left", "extend_right",
        "contract_up", "contract_down", "contract_left", "contract_right",
        "apply_label", "enter_text", "toggle_link_anchor", "commit_link",
        "undo", "search_prompt", "search_next", "search_prev",
        "toggle_legend", "toggle_line_numbers", "toggle_current_item", "toggle_progress",
        "next_file", "prev_file", "save", "quit",
        "next_disagreement", "reject_all", "cancel",
    }
)

VIEW_OPTIONS = ("legend", "line_numbers", "current_item", "progress")

DEFAULT_BINDINGS = (
    ("move_up", "UP"),
    ("move_down", "DOWN"),
    ("move_left", "LEFT"),
    ("move_right", "RIGHT"),
    ("extend_up", "S-UP"),
    ("extend_down", "S-DOWN"),
    ("extend_left", "S-LEFT"),
    ("extend_right", "S-RIGHT"),
    ("contract_up", "c+UP"),
    ("contract_down", "c+DOWN"),
    ("contract_left", "c+LEFT"),
    ("contract_right", "c+RIGHT"),
    ("enter_text", "t"),
    ("toggle_link_anchor", "l"),
    ("commit_link", "ENTER"),
    ("undo", "u"),
    ("search_prompt", "/"),
    ("search_next", "n"),
    ("search_prev", "p"),
    ("toggle_legend", "v+l"),
    ("toggle_line_numbers", "v+n"),
    ("toggle_current_item", "v+i"),
    ("toggle_progress", "v+p"),
    ("next_file", "]"),
    ("prev_file", "["),
    ("save", "s"),
    ("quit", "q"),
    ("next_disagreement", "d"),
    ("reject_all", "x"),
    ("cancel", "ESC"),
)

DEFAULT_LABELS = tuple((name, f"SPACE+{name}") for name in "abcdefgh")


class ConfigError(ValueError):
    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = problems
        super().__init__("; ".join(f"line {n}: {msg}" for n, msg in problems))


def parse_keyseq(text: str) -> tuple[str, ...]:
    if not text:
        raise ValueError("empty key sequence")
    keys = []
    for name in text.split("+"):
        if name == "PLUS":
            name = "+"
        elif name == " ":
            name = "SPACE"
        if not (name in NAMED_KEYS or (len(name) == 1 and name.isprintable())):
            raise ValueError(f"unknown key {name!r} in {text!r}")
        keys.append(name)
    return tuple(keys)


def format_keyseq(keys) -> str:
    return "+".join("PLUS" if k == "+" else k for k in keys)


@dataclass(frozen=True)
class LabelSpec:
    name: str
    keys: tuple[str, ...]
    color: str


@dataclass(frozen=True)
class KeyBinding:
    action: str
    keys: tuple[str, ...]
    arg: str | None = None


def _default_view() -> dict[str, bool]:
    return dict.fromkeys(VIEW_OPTIONS, False)


@dataclass(frozen=True)
class Config:
    labels: tuple[LabelSpec, ...] = ()
    bindings: tuple[KeyBinding, ...] = ()
    view: dict = field(default_factory=_default_view)

    def label_color(self, name: str) -> str:
        for spec in self.labels:
            if spec.name == name:
                return spec.color
        return PALETTE[hash_name(name) % len(PALETTE)]

    @property
    def keymap(self) -> "Keymap":
        km = self.__dict__.get("_keymap")
        if km is None:
            km = Keymap(self)
            object.__setattr__(self, "_keymap", km)
        return km


def hash_name(name: str) -> int:
    # stable across runs, unlike hash()
    return sum(ord(c) * 31**i for i, c in enumerate(name)) & 0xFFFF


def _label_bindings(labels) -> list[KeyBinding]:
    return [KeyBinding("apply_label", spec.keys, spec.name) for spec in labels]


def default_config() -> Config:
    labels = tuple(
        LabelSpec(name, parse_keyseq(keys), PALETTE[i % len(PALETTE)])
        for i, (name, keys) in enumerate(DEFAULT_LABELS)
    )
    bindings = tuple(KeyBinding(a, parse_keyseq(k)) for a, k in DEFAULT_BINDINGS)
    return Config(labels, bindings + tuple(_label_bindings(labels)))


def _conflict(a: tuple, b: tuple) -> bool:
    n = min(len(a), len(b))
    return a[:n] == b[:n]


def parse_config(text: str) -> Config:
    """Parse config ``text`` and merge it over the built-in defaults.

    Labels declared in the file replace the default label set.  A ``bind``
    replaces the default keys of its action, and defaults whose keys
    collide with anything declared in the file are dropped.  Conflicts
    inside the file raise ConfigError listing every offending line.
    """
    problems: list[tuple[int, str]] = []
    labels: list[LabelSpec] = []
    label_lines: dict[str, int] = {}
    user: list[tuple[int, KeyBinding]] = []
    view = _default_view()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        words = line.split()
        directive, args = words[0], words[1:]
        try:
            if directive == "label":
                if len(args) not in (2, 3):
                    raise ValueError("expected: label <name> <keys> [<colour>]")
                name, keys = args[0], parse_keyseq(args[1])
                if name in label_lines:
                    raise ValueError(f"duplicate label {name!r} (first defined on line {label_lines[name]})")
                if len(args) == 3:
                    color = args[2]
                    if color not in PALETTE:
                        raise ValueError(f"colour {color!r} not in palette {', '.join(PALETTE)}")
                else:
                    color = PALETTE[len(labels) % len(PALETTE)]
                label_lines[name] = lineno
                spec = LabelSpec(name, keys, color)
                labels.append(spec)
                user.append((lineno, KeyBinding("apply_label", keys, name)))
            elif directive == "bind":
                if len(args) != 2:
                    raise ValueError("expected: bind <action> <keys>")
                action = args[0]
                if action not in ACTIONS or action == "apply_label":
                    raise ValueError(f"unknown action {action!r}")
                user.append((lineno, KeyBinding(action, parse_keyseq(args[1]))))
            elif directive == "show":
                if len(args) != 2 or args[0] not in VIEW_OPTIONS or args[1] not in ("on", "off"):
                    raise ValueError(f"expected: show <{'|'.join(VIEW_OPTIONS)}> <on|off>")
                view[args[0]] = args[1] == "on"
            else:
                raise ValueError(f"unknown directive {directive!r}")
        except ValueError as err:
            problems.append((lineno, str(err)))

    seen: dict[tuple, int] = {}
    for lineno, binding in user:
        if binding.keys[0].isdigit():
            problems.append((lineno, f"{format_keyseq(binding.keys)}: digits are reserved for repeat counts"))
            continue
        for other, other_line in seen.items():
            if _conflict(binding.keys, other):
                problems.append(
                    (lineno, f"{format_keyseq(binding.keys)} conflicts with {format_keyseq(other)} on line {other_line}")
                )
                break
        else:
            seen[binding.keys] = lineno
    if problems:
        raise ConfigError(sorted(problems))

    base = default_config()
    user_keys = [b.keys for _, b in user]
    rebound = {b.action for _, b in user}
    defaults = [
        b
        for b in base.bindings
        if b.action not in rebound
        and not any(_conflict(b.keys, k) for k in user_keys)
        and (b.action != "apply_label" or not labels)
    ]
    if not labels:
        kept = {b.arg for b in defaults if b.action == "apply_label"}
        labels = [spec for spec in base.labels if spec.name in kept]
    return Config(tuple(labels), tuple(defaults) + tuple(b for _, b in user), view)


def _strip_comment(raw: str) -> str:
    # label names may contain '#'; only a '#' starting a word is a comment
    words = []
    for word in raw.split():
        if word.startswith("#"):
            break
        words.append(word)
    return " ".join(words)


def load_config(path=None) -> Config:
    """Config from ``path``; defaults when no path is given and
    ``slate.config`` is absent from the working directory."""
    if path is None:
        path = Path(DEFAULT_CONFIG_PATH)
        if not path.exists():
            return default_config()
    return parse_config(Path(path).read_text(encoding="utf-8"))


class Command(NamedTuple):
    action: str
    repeat: int = 1
    arg: str | None = None


class Pending(NamedTuple):
    keys: tuple[str, ...]


class Unbound(NamedTuple):
    keys: tuple[str, ...]


Decoded = Union[Command, Pending, Unbound]


class Keymap:
    """Prefix map over a prefix-free binding set."""

    def __init__(self, config: Config):
        self.bindings: dict[tuple, KeyBinding] = {}
        self.prefixes: set[tuple] = set()
        for b in config.bindings:
            self.bindings[b.keys] = b
            for i in range(1, len(b.keys)):
                self.prefixes.add(b.keys[:i])

    def keys_for(self, action: str, arg=None) -> tuple | None:
        for keys, b in self.bindings.items():
            if b.action == action and b.arg == arg:
                return keys
        return None


def decode_keys(config, pending: tuple, key: str) -> Decoded:
    """Extend ``pending`` with ``key`` and classify the result.

    Leading digits accumulate a repeat count.  The remaining keys either
    name a binding (Command), are a proper prefix of one (Pending) or
    match nothing (Unbound).
    """
    keymap = config.keymap if isinstance(config, Config) else config
    keys = tuple(pending) + (key,)
    i = 0
    while i < len(keys) and len(keys[i]) == 1 and keys[i].isdigit():
        i += 1
    digits, rest = keys[:i], keys[i:]
    if not rest:
        return Pending(keys)
    binding = keymap.bindings.get(rest)
    if binding is not None:
        repeat = max(1, min(MAX_REPEAT, int("".join(digits)))) if digits else 1
        return Command(binding.action, repeat, binding.arg)
    if rest in keymap.prefixes:
        return Pending(keys)
    return Unbound(keys)


class KeyDecoder:
    """Stateful wrapper around decode_keys."""

    def __init__(self, config: Config):
        self.keymap = config.keymap
        self.pending: tuple[str, ...] = ()

    def feed(self, key: str) -> Decoded:
        result = decode_keys(self.keymap, self.pending, key)
        self.pending = result.keys if isinstance(result, Pending) else ()
        return result

    def reset(self):
        self.pending = ()
