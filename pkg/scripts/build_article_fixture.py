"""Regenerate the verb-tagging fixture from the hand-marked article.

scripts/data/article.marked holds the article with every verb prefixed by
``*``.  This writes, under tests/data/:

  article.txt            the plain article (markers stripped)
  article.txt.reference  the reference annotation file, one Verb label per verb
  article.keys           a key script that walks to each verb and labels it
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from slate.core import Position, Span, tokenize  # noqa: E402
from slate.standoff import serialize  # noqa: E402
from slate.store import Annotation, AnnotationStore  # noqa: E402

MARK = "*"


def strip_marks(marked: str) -> tuple[str, list[tuple[int, int]]]:
    lines, verbs = [], []
    for li, line in enumerate(marked.splitlines()):
        words = []
        for ti, word in enumerate(line.split(" ")):
            if word.startswith(MARK):
                word = word[len(MARK):]
                verbs.append((li, ti))
            words.append(word)
        lines.append(" ".join(words))
    return "\n".join(lines) + "\n", verbs


def key_script(doc, verbs) -> str:
    out = ["# label every verb with the 'v' key, then save and quit"]
    line, tok = 0, 0
    for li, ti in verbs:
        keys = []
        if li > line:
            keys.append(f"{li - line} DOWN" if li - line > 1 else "DOWN")
            line = li
            tok = min(tok, len(doc.lines[li].tokens) - 1)
        step = ti - tok
        if step:
            direction = "RIGHT" if step > 0 else "LEFT"
            keys.append(f"{abs(step)} {direction}" if abs(step) > 1 else direction)
        tok = ti
        keys.append("v")
        out.append(" ".join(keys))
    out.append("s q")
    return "\n".join(out) + "\n"


def main():
    marked = (ROOT / "scripts" / "data" / "article.marked").read_text(encoding="utf-8")
    text, verbs = strip_marks(marked)
    doc = tokenize(text)
    store = AnnotationStore(Annotation.label(Span.single(Position(li, ti)), "Verb") for li, ti in verbs)
    data = ROOT / "tests" / "data"
    data.mkdir(parents=True, exist_ok=True)
    (data / "article.txt").write_text(text, encoding="utf-8")
    (data / "article.txt.reference").write_text(serialize(store), encoding="utf-8")
    (data / "article.keys").write_text(key_script(doc, verbs), encoding="utf-8")
    print(f"{len(text.split())} words, {len(verbs)} verbs")


if __name__ == "__main__":
    main()
