import os
import random
import subprocess
import warnings
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from helpers import LABELS, doc_and_store, random_doc, random_store
from slate.core import Position, Scope, Span, tokenize
from slate.standoff import (
    DuplicateRecordWarning,
    FormatError,
    annotation_path,
    escape_text,
    load,
    parse,
    save,
    serialize,
    unescape_text,
    write_atomic,
)
from slate.store import Annotation, AnnotationStore


def span(a, b=None):
    return Span(Position(*a), Position(*(b if b is not None else a)))


class TestSerialize:
    def test_empty(self):
        assert serialize(AnnotationStore()) == ""

    def test_label_grammar(self):
        s = AnnotationStore([Annotation.label(span((2, 3), (2, 5)), "Offer")])
        assert serialize(s) == "label (2,3)-(2,5) Offer\n"

    def test_all_kinds(self):
        s = AnnotationStore(
            [
                Annotation.link(span((5,)), span((2,))),
                Annotation.text(span((0, 0, 1)), "a\nb\\c"),
                Annotation.label(span(()), "spam"),
            ]
        )
        assert serialize(s) == "label () spam\ntext (0,0,1) a\\nb\\\\c\nlink (5) (2)\n"

    def test_canonical_order_breaks_ties_by_kind_then_payload(self):
        anns = [
            Annotation.text(span((0,)), "z"),
            Annotation.label(span((0,)), "B"),
            Annotation.label(span((0,)), "A"),
            Annotation.link(span((0,)), span((1,))),
            Annotation.link(span((0,)), span((0,))),
        ]
        lines = serialize(AnnotationStore(anns)).splitlines()
        assert lines == ["label (0) A", "label (0) B", "link (0) (0)", "link (0) (1)", "text (0) z"]

    def test_scope_filter(self):
        s = AnnotationStore([Annotation.label(span((0,)), "L"), Annotation.label(span((0, 0)), "T")])
        assert serialize(s, Scope.TOKEN) == "label (0,0) T\n"

    @given(doc_and_store(), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, ds, rnd):
        _, store = ds
        items = list(store)
        rnd.shuffle(items)
        assert serialize(AnnotationStore(items)) == serialize(store)

    @given(doc_and_store())
    def test_one_record_per_line(self, ds):
        _, store = ds
        text = serialize(store)
        assert text.count("\n") == len(store)
        assert all(line.isprintable() for line in text.splitlines())


class TestParse:
    def test_single_label(self):
        store = parse("label (0,0) Offer\n", tokenize("hello"))
        assert list(store) == [Annotation.label(span((0, 0)), "Offer")]

    def test_out_of_range_cites_tuple(self):
        with pytest.raises(FormatError) as err:
            parse("label (9,9) X\n", tokenize("one line"))
        assert "(9,9)" in str(err.value)
        assert err.value.lineno == 1

    def test_out_of_range_link_target(self):
        with pytest.raises(FormatError, match=r"\(7\)"):
            parse("link (0) (7)\n", tokenize("a\nb"))

    @pytest.mark.parametrize(
        "line",
        [
            "label (0,0)",
            "note (0) x",
            "label (0,a) x",
            "label (0) two words",
            "label (1)-(0) x",
            "label (0)-(0,1) x",
            "link (0) (0,0)",
            "link (0) nonsense",
            "text (0) bad\\q",
            "text (0) trunc\\u12",
            "label ( 0 ) x",
            "text (0) ",
        ],
    )
    def test_malformed(self, line):
        with pytest.raises(FormatError) as err:
            parse("label (0) ok\n" + line + "\n")
        assert err.value.lineno == 2

    def test_duplicate_warns_and_keeps_once(self):
        with pytest.warns(DuplicateRecordWarning):
            store = parse("label (0) x\nlabel (0) x\n")
        assert len(store) == 1

    def test_missing_final_newline_is_accepted(self):
        assert len(parse("label (0) x")) == 1

    def test_blank_input(self):
        assert len(parse("")) == 0
        assert len(parse("\n")) == 0

    @given(doc_and_store())
    def test_round_trip(self, ds):
        doc, store = ds
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            back = parse(serialize(store), doc)
        assert back == store
        assert serialize(back) == serialize(store)


class TestEscapes:
    @given(st.text())
    def test_round_trip(self, text):
        escaped = escape_text(text)
        assert "\n" not in escaped and "\r" not in escaped
        assert escaped.isprintable()
        assert unescape_text(escaped) == text

    def test_examples(self):
        assert escape_text("a\tb") == "a\\tb"
        assert escape_text("\x00") == "\\u0000"
        assert escape_text(" ") == "\\u2028"
        assert unescape_text("\\U0001f642") == "🙂"


class TestPaths:
    def test_suffixes(self):
        assert annotation_path("log.txt") == Path("log.txt.annotations")
        assert annotation_path("a/b/c") == Path("a/b/c.annotations")
        assert annotation_path("log.txt", adjudicated=True) == Path("log.txt.adjudicated")


class TestFiles:
    def test_save_load(self, tmp_path):
        doc = random_doc(random.Random(3))
        store = random_store(random.Random(4), doc, 20)
        path = tmp_path / "d.txt.annotations"
        save(path, store)
        assert load(path, doc) == store
        assert path.read_bytes() == serialize(store).encode("utf-8")

    def test_atomic_write_leaves_old_file_on_failure(self, tmp_path, monkeypatch):
        path = tmp_path / "f"
        path.write_text("old\n")

        def boom(src, dst):
            raise OSError("disk full")

        monkeypatch.setattr(os, "replace", boom)
        with pytest.raises(OSError):
            write_atomic(path, "new\n")
        assert path.read_text() == "old\n"
        assert os.listdir(tmp_path) == ["f"]

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "f"
        save(path, AnnotationStore([Annotation.text(span((0,)), "x\r\ny")]))
        assert path.read_bytes() == b"text (0) x\\r\\ny\n"


class TestGreppability:
    def test_wc_counts_records(self, tmp_path):
        rng = random.Random(11)
        doc = random_doc(rng)
        store = random_store(rng, doc, 50)
        path = tmp_path / "f.annotations"
        save(path, store)
        # independent oracle: count newline bytes like `wc -l`
        assert path.read_bytes().count(b"\n") == len(store)
        try:
            out = subprocess.run(["wc", "-l", str(path)], capture_output=True, text=True, check=True).stdout
        except (OSError, subprocess.CalledProcessError):
            pytest.skip("wc not available")
        assert int(out.split()[0]) == len(store)

    @pytest.mark.parametrize("seed", range(10))
    def test_substring_search_finds_label_records(self, seed):
        rng = random.Random(seed)
        doc = random_doc(rng)
        store = random_store(rng, doc, 30)
        text = serialize(store)
        for name in LABELS:
            hits = [line for line in text.splitlines() if line.startswith("label ") and line.endswith(" " + name)]
            expected = sorted(
                serialize(AnnotationStore([a])).rstrip("\n")
                for a in store
                if a.kind.value == "label" and a.value == name
            )
            assert sorted(hits) == expected
