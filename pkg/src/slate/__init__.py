"""Terminal-based text annotation: labels, free text and links over
characters, tokens, lines or whole documents, with adjudication."""

from slate.core import (
    AddressError,
    Document,
    Position,
    Scope,
    ScopeError,
    Span,
    items_in,
    next_item,
    normalize_span,
    tokenize,
)
from slate.store import Annotation, AnnotationStore, Kind
from slate.standoff import FormatError, annotation_path, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "AddressError",
    "Annotation",
    "AnnotationStore",
    "Document",
    "FormatError",
    "Kind",
    "Position",
    "Scope",
    "ScopeError",
    "Span",
    "annotation_path",
    "items_in",
    "next_item",
    "normalize_span",
    "parse",
    "serialize",
    "tokenize",
]
