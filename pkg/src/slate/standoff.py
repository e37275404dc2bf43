"""Stand-off annotation files.

One record per line, ``<kind> <span> <payload>``::

    label (2,3)-(2,5) Offer
    text (4) check later
    link (5) (2)

Positions are comma-separated integers in parentheses with no spaces; a
span is a single position or two joined by ``-``.  Free text is escaped so
that a record never contains a raw newline or other control character.
"""

from __future__ import annotations

import os
import re
import tempfile
import warnings
from pathlib import Path

from slate.core import Document, Position, Scope, Span
from slate.store import Annotation, AnnotationStore, Kind

ANNOTATION_SUFFIX = ".annotations"
ADJUDICATED_SUFFIX = ".adjudicated"

_POS = r"\((?:\d+(?:,\d+){0,2})?\)"
_SPAN_RE = re.compile(rf"({_POS})(?:-({_POS}))?")

_ESCAPES = {"\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", "n": "\n", "r": "\r", "t": "\t"}


class FormatError(ValueError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class DuplicateRecordWarning(UserWarning):
    pass


def escape_text(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ch.isprintable() or ch == " ":
            out.append(ch)
        elif ord(ch) <= 0xFFFF:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(f"\\U{ord(ch):08x}")
    return "".join(out)


def unescape_text(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        code = text[i + 1 : i + 2]
        if code in _UNESCAPES:
            out.append(_UNESCAPES[code])
            i += 2
        elif code in ("u", "U"):
            width = 4 if code == "u" else 8
            digits = text[i + 2 : i + 2 + width]
            if len(digits) != width or not all(c in "0123456789abcdefABCDEF" for c in digits):
                raise ValueError(f"bad escape \\{code}{digits}")
            out.append(chr(int(digits, 16)))
            i += 2 + width
        else:
            raise ValueError(f"bad escape \\{code}")
    return "".join(out)


def format_span(span: Span) -> str:
    return str(span)


def parse_position(text: str) -> Position:
    inner = text[1:-1]
    if not inner:
        return Position()
    return Position(*(int(x) for x in inner.split(",")))


def parse_span(text: str) -> Span:
    m = _SPAN_RE.fullmatch(text)
    if not m:
        raise ValueError(f"malformed span {text!r}")
    start = parse_position(m.group(1))
    end = parse_position(m.group(2)) if m.group(2) else start
    return Span(start, end)


def format_record(ann: Annotation) -> str:
    if ann.kind is Kind.LINK:
        payload = format_span(ann.value)
    elif ann.kind is Kind.TEXT:
        payload = escape_text(ann.value)
    else:
        payload = ann.value
    return f"{ann.kind.value} {format_span(ann.span)} {payload}"


def serialize(store, scope: Scope | None = None) -> str:
    """Canonical file text for ``store``; with ``scope``, only records at
    that scope are written."""
    anns = sorted(store, key=Annotation.sort_key)
    if scope is not None:
        anns = [a for a in anns if a.span.scope == scope]
    return "".join(format_record(a) + "\n" for a in anns)


def _check(doc: Document | None, span: Span, lineno: int):
    if doc is None:
        return
    for pos in (span.start, span.end):
        if not doc.is_valid(pos):
            raise FormatError(lineno, f"position {pos} is out of range")


def parse_record(line: str, lineno: int = 1, doc: Document | None = None) -> Annotation:
    parts = line.split(" ", 2)
    if len(parts) < 3:
        raise FormatError(lineno, f"expected '<kind> <span> <payload>', got {line!r}")
    kind, span_text, payload = parts
    if kind not in ("label", "text", "link"):
        raise FormatError(lineno, f"unknown record kind {kind!r}")
    try:
        span = parse_span(span_text)
    except ValueError as err:
        raise FormatError(lineno, str(err)) from None
    _check(doc, span, lineno)
    try:
        if kind == "label":
            return Annotation.label(span, payload)
        if kind == "text":
            if not payload:
                raise ValueError("empty text payload")
            return Annotation.text(span, unescape_text(payload))
        target = parse_span(payload)
        _check(doc, target, lineno)
        return Annotation.link(span, target)
    except (ValueError, TypeError) as err:
        if isinstance(err, FormatError):
            raise
        raise FormatError(lineno, str(err)) from None


def parse(text: str, doc: Document | None = None) -> AnnotationStore:
    """Read annotation file text; positions are checked against ``doc``.

    Raises FormatError for malformed or out-of-range records.  Duplicate
    records are kept once with a DuplicateRecordWarning.
    """
    store = AnnotationStore()
    if text.endswith("\n"):
        text = text[:-1]
    if not text:
        return store
    seen = store._items
    for lineno, line in enumerate(text.split("\n"), start=1):
        ann = parse_record(line, lineno, doc)
        if ann in seen:
            warnings.warn(f"line {lineno}: duplicate record {line!r}", DuplicateRecordWarning, stacklevel=2)
            continue
        seen[ann] = None
    return store


def annotation_path(data_path, adjudicated: bool = False) -> Path:
    suffix = ADJUDICATED_SUFFIX if adjudicated else ANNOTATION_SUFFIX
    return Path(str(data_path) + suffix)


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def load(path, doc: Document | None = None) -> AnnotationStore:
    with open(path, encoding="utf-8", newline="") as f:
        return parse(f.read(), doc)


def save(path, store) -> None:
    write_atomic(path, serialize(store))


__all__ = [
    "DuplicateRecordWarning",
    "FormatError",
    "annotation_path",
    "load",
    "parse",
    "save",
    "serialize",
    "write_atomic",
]
