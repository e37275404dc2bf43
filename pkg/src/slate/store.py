"""Annotations over spans and the per-document store that holds them."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from slate.core import Position, ScopeError, Span


class Kind(str, enum.Enum):
    LABEL = "label"
    TEXT = "text"
    LINK = "link"


@dataclass(frozen=True)
class Annotation:
    kind: Kind
    span: Span
    value: Union[str, Span]  # label name, free text, or link target

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.LABEL:
            check_label(self.value)
        elif self.kind is Kind.TEXT:
            if not isinstance(self.value, str):
                raise TypeError("text annotation needs a string")
            if not self.value:
                raise ValueError("text annotation needs non-empty text")
        else:
            if not isinstance(self.value, Span):
                raise TypeError("link annotation needs a target span")
            if self.value.scope != self.span.scope:
                raise ScopeError(f"link endpoints differ in scope: {self.span} -> {self.value}")

    @classmethod
    def label(cls, span: Span, name: str) -> "Annotation":
        return cls(Kind.LABEL, span, name)

    @classmethod
    def text(cls, span: Span, text: str) -> "Annotation":
        return cls(Kind.TEXT, span, text)

    @classmethod
    def link(cls, source: Span, target: Span) -> "Annotation":
        return cls(Kind.LINK, source, target)

    @property
    def spans(self) -> tuple[Span, ...]:
        if self.kind is Kind.LINK:
            return (self.span, self.value)
        return (self.span,)

    def touches(self, item) -> bool:
        return any(s.contains(item) for s in self.spans)

    def sort_key(self):
        value = self.value
        if isinstance(value, Span):
            value = (value.start, value.end)
        return (self.span.start, self.span.end, self.kind.value, value)


def check_label(name) -> str:
    if not isinstance(name, str) or not name or not name.isprintable() or any(ch.isspace() for ch in name):
        raise ValueError(f"invalid label {name!r}: must be a non-empty printable word without whitespace")
    return name


@dataclass(frozen=True)
class Edit:
    """One undoable change: annotations added and removed together."""

    added: tuple[Annotation, ...] = ()
    removed: tuple[Annotation, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.added or self.removed)


class AnnotationStore:
    """Insertion-ordered set of annotations with an undo journal.

    Equality compares the annotation sets only; the journal is session
    state and never persisted.
    """

    def __init__(self, annotations: Iterable[Annotation] = ()):
        self._items: dict[Annotation, None] = dict.fromkeys(annotations)
        self.journal: list[Edit] = []

    def __iter__(self) -> Iterator[Annotation]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, ann) -> bool:
        return ann in self._items

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnnotationStore):
            return NotImplemented
        return self._items.keys() == other._items.keys()

    def __repr__(self) -> str:
        return f"AnnotationStore({list(self._items)!r})"

    def snapshot(self) -> frozenset[Annotation]:
        return frozenset(self._items)

    def copy(self) -> "AnnotationStore":
        return AnnotationStore(self._items)

    def sorted(self) -> list[Annotation]:
        return sorted(self._items, key=Annotation.sort_key)

    def commit(self, edit: Edit) -> Edit | None:
        """Apply ``edit`` and journal it; empty edits are dropped."""
        edit = Edit(
            added=tuple(a for a in dict.fromkeys(edit.added) if a not in self._items or a in edit.removed),
            removed=tuple(a for a in dict.fromkeys(edit.removed) if a in self._items),
        )
        if set(edit.added) == set(edit.removed):
            edit = Edit()
        if not edit:
            return None
        for ann in edit.removed:
            del self._items[ann]
        for ann in edit.added:
            self._items[ann] = None
        self.journal.append(edit)
        return edit

    def toggle(self, ann: Annotation) -> Edit:
        if ann in self._items:
            return self.commit(Edit(removed=(ann,)))
        return self.commit(Edit(added=(ann,)))

    def apply_label(self, span: Span, name: str) -> Edit:
        return self.toggle(Annotation.label(span, check_label(name)))

    def set_text(self, span: Span, text: str) -> Edit | None:
        old = tuple(a for a in self._items if a.kind is Kind.TEXT and a.span == span)
        new = (Annotation.text(span, text),) if text else ()
        if old == new:
            return None
        return self.commit(Edit(added=new, removed=old))

    def toggle_link(self, source: Span, target: Span) -> Edit:
        return self.toggle(Annotation.link(source, target))

    def text_at(self, span: Span) -> str | None:
        for a in self._items:
            if a.kind is Kind.TEXT and a.span == span:
                return a.value
        return None

    def undo(self) -> Edit | None:
        if not self.journal:
            return None
        edit = self.journal.pop()
        for ann in edit.added:
            del self._items[ann]
        for ann in edit.removed:
            self._items[ann] = None
        return edit

    def annotations_at(self, item) -> list[Annotation]:
        """Annotations whose span (or link target) contains ``item``, in
        canonical order."""
        item = Position(*item)
        return sorted((a for a in self._items if a.touches(item)), key=Annotation.sort_key)

    def linked_partners(self, source: Span) -> list[Span]:
        return sorted(a.value for a in self._items if a.kind is Kind.LINK and a.span == source)
