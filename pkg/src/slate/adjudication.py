"""Compare several annotators' stores and resolve their disagreements.

Agreement is exact identity: an annotation is agreed when every input
store contains it, and disputed when only some do.  The resolution store
starts as the agreed core; the adjudicator then accepts or rejects the
disputed items one by one.
"""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

from slate.core import Document, Position, items_in
from slate.store import Annotation, AnnotationStore, Edit

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DisagreementSet:
    agreed: frozenset
    disputed: dict  # Annotation -> frozenset of annotator names
    disputed_items: frozenset

    @property
    def partition(self) -> tuple[frozenset, frozenset]:
        return self.agreed, frozenset(self.disputed)


def annotation_items(doc: Document, ann: Annotation) -> set[Position]:
    items = set()
    for span in ann.spans:
        items.update(items_in(doc, span))
    return items


def compute_disagreements(stores: Sequence, doc: Document, names: Sequence[str] | None = None) -> DisagreementSet:
    if len(stores) < 2:
        raise ValueError(f"adjudication needs at least two stores, got {len(stores)}")
    if names is None:
        names = [f"annotator{i + 1}" for i in range(len(stores))]
    if len(names) != len(stores):
        raise ValueError("one name per store is required")
    scopes = {ann.span.scope for store in stores for ann in store}
    if len(scopes) > 1:
        raise ValueError(f"inputs mix scopes: {sorted(s.label for s in scopes)}")

    owners: dict[Annotation, set[str]] = {}
    for name, store in zip(names, stores):
        for ann in store:
            owners.setdefault(ann, set()).add(name)
    everyone = set(names)
    agreed = frozenset(a for a, who in owners.items() if who == everyone)
    disputed = {a: frozenset(who) for a, who in sorted(owners.items(), key=lambda kv: kv[0].sort_key()) if who != everyone}
    items = set()
    for ann in disputed:
        items |= annotation_items(doc, ann)
    return DisagreementSet(agreed, disputed, frozenset(items))


@dataclass(frozen=True)
class RejectAll:
    """Decision: nothing disputed survives at ``item``."""

    item: Position


class Adjudication:
    """Resolution state for one document.

    ``resolution`` is the output store.  ``resolved_items`` only grows,
    except when an adjudicator action is undone.
    """

    def __init__(self, doc: Document, stores: Sequence, names: Sequence[str] | None = None, resolution: AnnotationStore | None = None):
        self.doc = doc
        self.stores = list(stores)
        self.names = list(names) if names is not None else [f"annotator{i + 1}" for i in range(len(stores))]
        self.disagreements = compute_disagreements(self.stores, doc, self.names)
        if resolution is None:
            resolution = AnnotationStore(sorted(self.disagreements.agreed, key=Annotation.sort_key))
        self.resolution = resolution
        self.resolved_items: set[Position] = set()
        self._history: list[tuple[bool, frozenset]] = []
        self._items = {a: annotation_items(doc, a) for a in self.disagreements.disputed}

    @property
    def disputed(self) -> dict:
        return self.disagreements.disputed

    @property
    def agreed(self) -> frozenset:
        return self.disagreements.agreed

    def unresolved(self) -> list[Position]:
        return sorted(self.disagreements.disputed_items - self.resolved_items)

    @property
    def complete(self) -> bool:
        return self.disagreements.disputed_items <= self.resolved_items

    def attribution(self, ann: Annotation) -> list[str]:
        if ann in self.disagreements.agreed:
            return list(self.names)
        return [n for n in self.names if n in self.disagreements.disputed.get(ann, ())]

    def next_disagreement(self, start) -> Position | None:
        """First unresolved disputed item after ``start``, wrapping once."""
        pending = self.unresolved()
        if not pending:
            return None
        i = bisect_right(pending, tuple(start))
        return pending[i] if i < len(pending) else pending[0]

    def _disputed_items_of(self, anns) -> set[Position]:
        out = set()
        for ann in anns:
            if ann in self._items:
                out |= self._items[ann]
            else:
                out |= annotation_items(self.doc, ann) & self.disagreements.disputed_items
        return out

    def _record(self, edit: Edit | None, affected: set) -> frozenset:
        new = frozenset(affected - self.resolved_items)
        self.resolved_items |= new
        self._history.append((edit is not None, new))
        return new

    def resolve(self, decision) -> bool:
        """Accept a disputed annotation, or reject everything disputed that
        starts at an item.  Returns False (and logs) when the decision
        touches no disputed item."""
        if isinstance(decision, RejectAll):
            item = Position(*decision.item)
            if item not in self.disagreements.disputed_items:
                log.warning("no disagreement at %s", item)
                return False
            doomed = tuple(
                a for a in self.resolution
                if a in self.disagreements.disputed and a.span.contains(item)
            )
            edit = self.resolution.commit(Edit(removed=doomed))
            self._record(edit, {item})
            return True
        if decision in self.disagreements.agreed and decision not in self.disagreements.disputed:
            return False
        affected = self._disputed_items_of([decision])
        if not affected:
            log.warning("%s touches no disagreement", decision)
            return False
        edit = self.resolution.commit(Edit(added=(decision,)))
        self._record(edit, affected)
        return True

    def edit(self, change: Callable[[AnnotationStore], Edit | None]) -> Edit | None:
        """Run a store operation on the resolution; disputed items it
        touches count as resolved."""
        edit = change(self.resolution)
        if edit is None:
            return None
        self._record(edit, self._disputed_items_of(edit.added + edit.removed))
        return edit

    def undo(self) -> bool:
        if not self._history:
            return False
        journaled, new = self._history.pop()
        if journaled:
            self.resolution.undo()
        self.resolved_items -= new
        return True


__all__ = [
    "Adjudication",
    "DisagreementSet",
    "RejectAll",
    "compute_disagreements",
]

