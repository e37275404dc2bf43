import itertools
import logging
import random

import pytest
from hypothesis import given, strategies as st

from helpers import LABELS, random_doc, random_span
from slate.adjudication import Adjudication, RejectAll, compute_disagreements
from slate.core import Position, Scope, Span, items_in, tokenize
from slate.session import ADJUDICATE, FileState, Session
from slate.standoff import serialize
from slate.store import Annotation, AnnotationStore, Kind


def line(i):
    return Span.single(Position(i))


def fuzz_triple(rng, max_size=20):
    doc = random_doc(rng)
    scope = rng.choice([Scope.LINE, Scope.TOKEN])
    pool = []
    for _ in range(12):
        s = random_span(rng, doc, scope)
        pool.append(rng.choice([Annotation.label(s, rng.choice(LABELS)), Annotation.link(s, random_span(rng, doc, scope))]))
    stores = [AnnotationStore(rng.sample(pool, rng.randint(0, min(max_size, len(pool))))) for _ in range(3)]
    return doc, stores


def oracle(doc, stores, names):
    union = set()
    for s in stores:
        union |= set(s)
    agreed, disputed = set(), {}
    for ann in union:
        owners = frozenset(n for n, s in zip(names, stores) if ann in set(s))
        if len(owners) == len(stores):
            agreed.add(ann)
        else:
            disputed[ann] = owners
    items = set()
    for ann in disputed:
        for span in ann.spans:
            items |= {p for p in doc.items(span.scope) if span.start <= p <= span.end}
    return agreed, disputed, items


class TestCompute:
    def test_identical(self):
        a = AnnotationStore([Annotation.label(line(0), "x")])
        d = compute_disagreements([a, a.copy()], tokenize("a\nb"))
        assert d.disputed == {} and d.agreed == {Annotation.label(line(0), "x")}
        assert not d.disputed_items

    def test_disjoint(self):
        l1, l2 = Annotation.label(line(0), "x"), Annotation.label(line(1), "y")
        d = compute_disagreements([AnnotationStore([l1]), AnnotationStore([l2])], tokenize("a\nb"), ["A", "B"])
        assert d.agreed == frozenset()
        assert d.disputed == {l1: {"A"}, l2: {"B"}}

    def test_arity(self):
        with pytest.raises(ValueError):
            compute_disagreements([AnnotationStore()], tokenize("a"))

    def test_mixed_scopes(self):
        a = AnnotationStore([Annotation.label(line(0), "x")])
        b = AnnotationStore([Annotation.label(Span.single(Position(0, 0)), "x")])
        with pytest.raises(ValueError):
            compute_disagreements([a, b], tokenize("a"))

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_membership_oracle(self, seed):
        doc, stores = fuzz_triple(random.Random(seed))
        names = ["A", "B", "C"]
        d = compute_disagreements(stores, doc, names)
        agreed, disputed, items = oracle(doc, stores, names)
        assert d.agreed == agreed
        assert d.disputed == disputed
        assert d.disputed_items == items
        assert not (d.agreed & set(d.disputed))

    @given(st.integers(0, 2**32), st.permutations([0, 1, 2]))
    def test_symmetric(self, seed, perm):
        doc, stores = fuzz_triple(random.Random(seed))
        names = ["A", "B", "C"]
        d1 = compute_disagreements(stores, doc, names)
        d2 = compute_disagreements([stores[i] for i in perm], doc, [names[i] for i in perm])
        assert d1.partition == d2.partition
        assert d1.disputed == d2.disputed
        assert d1.disputed_items == d2.disputed_items


class TestNextDisagreement:
    def test_all_resolved(self):
        s = AnnotationStore([Annotation.label(line(1), "x")])
        adj = Adjudication(tokenize("a\nb"), [s, s.copy()])
        assert adj.next_disagreement(Position(0)) is None

    def test_single(self):
        doc = tokenize("\n".join("w" for _ in range(6)))
        adj = Adjudication(doc, [AnnotationStore([Annotation.label(line(4), "x")]), AnnotationStore()])
        assert adj.next_disagreement(Position(0)) == Position(4)
        assert adj.next_disagreement(Position(4)) == Position(4)  # wraps to itself

    @pytest.mark.parametrize("seed", range(20))
    def test_sorted_scan(self, seed):
        rng = random.Random(seed)
        doc, stores = fuzz_triple(rng)
        adj = Adjudication(doc, stores)
        items = sorted(adj.disagreements.disputed_items)
        for _ in range(min(3, len(items))):
            adj.resolve(RejectAll(rng.choice(items)))
        pending = sorted(adj.disagreements.disputed_items - adj.resolved_items)
        scope = next(iter(items)).scope if items else Scope.LINE
        for pos in doc.items(scope):
            later = [p for p in pending if p > pos]
            expected = later[0] if later else (pending[0] if pending else None)
            assert adj.next_disagreement(pos) == expected


class TestResolve:
    def setup_method(self):
        self.doc = tokenize("\n".join(f"msg {i}" for i in range(7)))
        self.a = AnnotationStore([Annotation.link(line(5), line(2)), Annotation.link(line(1), line(0))])
        self.b = AnnotationStore([Annotation.link(line(5), line(3)), Annotation.link(line(1), line(0))])
        self.adj = Adjudication(self.doc, [self.a, self.b], ["A", "B"])

    def test_agreed_core_is_preloaded(self):
        assert set(self.adj.resolution) == {Annotation.link(line(1), line(0))}

    def test_accept_link(self):
        assert self.adj.resolve(Annotation.link(line(5), line(2)))
        assert Annotation.link(line(5), line(2)) in self.adj.resolution
        assert Annotation.link(line(5), line(3)) not in self.adj.resolution
        assert Position(5) in self.adj.resolved_items

    def test_reject_all(self):
        self.adj.resolve(Annotation.link(line(5), line(2)))
        assert self.adj.resolve(RejectAll(Position(5)))
        assert Annotation.link(line(5), line(2)) not in self.adj.resolution
        assert Position(5) in self.adj.resolved_items

    def test_reject_label(self):
        doc = tokenize("a b")
        adj = Adjudication(doc, [AnnotationStore([Annotation.label(line(0), "x")]), AnnotationStore()])
        assert adj.resolve(RejectAll(Position(0)))
        assert len(adj.resolution) == 0
        assert adj.complete

    def test_no_disagreement_is_logged_noop(self, caplog):
        with caplog.at_level(logging.WARNING):
            assert not self.adj.resolve(RejectAll(Position(6)))
        assert "no disagreement" in caplog.text
        assert not self.adj.resolve(Annotation.link(line(1), line(0)))
        assert not self.adj.resolved_items

    def test_adjudicator_authored(self):
        assert self.adj.resolve(Annotation.link(line(5), line(4)))
        assert Annotation.link(line(5), line(4)) in self.adj.resolution

    def test_undo(self):
        before = self.adj.resolution.snapshot()
        self.adj.resolve(Annotation.link(line(5), line(2)))
        assert self.adj.undo()
        assert self.adj.resolution.snapshot() == before
        assert not self.adj.resolved_items
        assert not self.adj.undo()

    @pytest.mark.parametrize("seed", range(20))
    def test_output_is_core_plus_accepted(self, seed):
        rng = random.Random(seed)
        doc, stores = fuzz_triple(rng)
        adj = Adjudication(doc, stores)
        accepted = set()
        for ann in adj.disputed:
            if rng.random() < 0.5:
                adj.resolve(ann)
                accepted.add(ann)
        for item in adj.unresolved():
            if all(a not in accepted or not a.span.contains(item) for a in adj.disputed):
                adj.resolve(RejectAll(item))
        # anything left unresolved is only covered by accepted annotations
        for item in adj.unresolved():
            adj.resolved_items.add(item)
        assert adj.complete
        assert adj.agreed <= adj.resolution.snapshot()
        assert adj.resolution.snapshot() == adj.agreed | accepted

    @pytest.mark.parametrize("seed", range(20))
    def test_identical_inputs(self, seed):
        rng = random.Random(seed)
        doc, (store, _, _) = fuzz_triple(rng)
        adj = Adjudication(doc, [store, store.copy(), store.copy()])
        assert not adj.disagreements.disputed_items
        assert adj.complete
        assert serialize(adj.resolution) == serialize(store)

    def test_resolved_items_grow_without_undo(self):
        rng = random.Random(2)
        doc, stores = fuzz_triple(rng)
        adj = Adjudication(doc, stores)
        seen = set()
        for ann in itertools.islice(adj.disputed, 10):
            adj.resolve(ann if rng.random() < 0.5 else RejectAll(next(iter(items_in(doc, ann.span)))))
            assert seen <= adj.resolved_items
            seen = set(adj.resolved_items)


class TestSessionAdjudication:
    def make(self, tmp_path):
        doc = tokenize("\n".join(f"msg {i}" for i in range(7)))
        a = AnnotationStore([Annotation.link(line(5), line(2))])
        b = AnnotationStore([Annotation.link(line(5), line(3))])
        adj = Adjudication(doc, [a, b], ["A", "B"])
        f = FileState(tmp_path / "chat.txt", doc, None, Scope.LINE, adjudication=adj, on_disk=False)
        return Session([f], kind=Kind.LINK, scope=Scope.LINE, mode=ADJUDICATE)

    def test_accept_via_commands(self, tmp_path):
        s = self.make(tmp_path)
        s.run("next_disagreement")
        assert s.cursor == Position(2)
        s.run("next_disagreement", 2)
        assert s.cursor == Position(5)
        s.run("toggle_link_anchor")
        s.run("move_up", 3)
        s.run("commit_link")
        assert set(s.store) == {Annotation.link(line(5), line(2))}
        assert s.adjudication.unresolved() == [Position(3)]
        s.run("next_disagreement")
        assert s.cursor == Position(3)
        s.run("reject_all")
        assert s.adjudication.complete

    def test_quit_warns_on_unresolved(self, tmp_path):
        s = self.make(tmp_path)
        s.save()
        s.run("quit")
        assert not s.finished and "unresolved" in s.status
        s.run("quit")
        assert s.finished

    def test_output_written_even_if_unchanged(self, tmp_path):
        s = self.make(tmp_path)
        assert s.save() == [tmp_path / "chat.txt.adjudicated"]
        assert (tmp_path / "chat.txt.adjudicated").read_text() == ""

    def test_undo_through_session(self, tmp_path):
        s = self.make(tmp_path)
        s.run("move_down", 3)
        s.run("reject_all")
        assert Position(3) in s.adjudication.resolved_items
        s.run("undo")
        assert Position(3) not in s.adjudication.resolved_items
