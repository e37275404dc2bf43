"""Random documents and stores for fuzz and property tests."""

import random

from hypothesis import strategies as st

from slate.core import Scope, Span, tokenize
from slate.store import Annotation, AnnotationStore

WORDS = ["a", "bb", "ccc", "Offer", "x=1", "漢字", "é", "é", "$20", "--"]
SPACES = [" ", " ", "  ", "\t", "　"]
LABELS = ["Offer", "Request", "Rate", "Verb", "x", "漢"]
TEXTS = ["check later", "a\nb", "tab\there", "back\\slash", "  padded  ", "ü", "\x00ctrl", "🙂"]


def random_text(rng: random.Random, max_lines: int = 5, max_words: int = 6) -> str:
    lines = []
    for _ in range(rng.randint(1, max_lines)):
        words = [rng.choice(WORDS) for _ in range(rng.randint(0, max_words))]
        line = ""
        for w in words:
            line += rng.choice(SPACES) + w if line or rng.random() < 0.3 else w
        if rng.random() < 0.2:
            line += " "
        lines.append(line)
    return "\n".join(lines)


def random_doc(rng: random.Random, **kw):
    while True:
        doc = tokenize(random_text(rng, **kw))
        if doc.count(Scope.TOKEN):
            return doc


def random_span(rng: random.Random, doc, scope: Scope) -> Span:
    items = list(doc.items(scope))
    a, b = rng.choice(items), rng.choice(items)
    return Span(min(a, b), max(a, b))


def random_annotation(rng: random.Random, doc, scope: Scope | None = None) -> Annotation:
    scope = scope if scope is not None else rng.choice(list(Scope))
    span = random_span(rng, doc, scope)
    kind = rng.choice(["label", "text", "link"])
    if kind == "label":
        return Annotation.label(span, rng.choice(LABELS))
    if kind == "text":
        return Annotation.text(span, rng.choice(TEXTS))
    return Annotation.link(span, random_span(rng, doc, scope))


def random_store(rng: random.Random, doc, n: int, scope: Scope | None = None) -> AnnotationStore:
    return AnnotationStore(random_annotation(rng, doc, scope) for _ in range(n))


# -- hypothesis ----------------------------------------------------------

texts = st.builds(lambda seed: random_text(random.Random(seed)), st.integers(0, 2**32))
raw_texts = st.text(alphabet="ab c\t\n漢é́=", max_size=40)
docs = st.builds(lambda seed: random_doc(random.Random(seed)), st.integers(0, 2**32))
scopes = st.sampled_from(list(Scope))
fine_scopes = st.sampled_from([Scope.LINE, Scope.TOKEN, Scope.CHARACTER])


@st.composite
def doc_and_store(draw, scope=None, max_size=12):
    seed = draw(st.integers(0, 2**32))
    rng = random.Random(seed)
    doc = random_doc(rng)
    n = draw(st.integers(0, max_size))
    return doc, random_store(rng, doc, n, scope)


@st.composite
def doc_and_position(draw, scope_strategy=fine_scopes):
    doc = draw(docs)
    scope = draw(scope_strategy)
    items = list(doc.items(scope))
    return doc, draw(st.sampled_from(items))


def all_items(doc, scope):
    return list(doc.items(scope))


def brute_contains(doc, ann, item) -> bool:
    """Containment by enumerating the items of each span."""
    for span in ann.spans:
        members = set()
        for p in doc.items(span.scope):
            if span.start <= p <= span.end:
                members.add(p)
        if tuple(item[: len(span.start)]) in members and len(item) >= len(span.start):
            return True
    return False

