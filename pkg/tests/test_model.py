"""Span arithmetic, direction semantics, and dataset derived counts."""
from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relsearch.errors import IntegrityError
from relsearch.model import Direction, Span, relation_sentence_window


class TestSpan:
    def test_from_indices_merges_runs(self):
        assert Span.from_indices([5, 3, 4, 9]).ranges == ((3, 5), (9, 9))

    def test_adjacent_ranges_merge(self):
        assert Span(((0, 2), (3, 4))).ranges == ((0, 4),)

    def test_out_of_order_ranges_sorted(self):
        assert Span(((7, 9), (1, 2))).ranges == ((1, 2), (7, 9))

    def test_overlap_rejected(self):
        with pytest.raises(IntegrityError):
            Span(((0, 4), (3, 6)))

    def test_reversed_range_rejected(self):
        with pytest.raises(IntegrityError):
            Span(((4, 2),))

    def test_len_and_contains(self):
        s = Span(((3, 5), (9, 9)))
        assert len(s) == 4
        assert 4 in s and 9 in s and 6 not in s

    def test_first_last(self):
        s = Span(((3, 5), (9, 9)))
        assert s.first() == 3
        assert s.last() == 9

    def test_first_on_empty_raises(self):
        with pytest.raises(IntegrityError):
            Span().first()

    def test_union_and_overlaps(self):
        a = Span(((0, 2),))
        b = Span(((4, 5),))
        assert a.union(b).ranges == ((0, 2), (4, 5))
        assert not a.overlaps(b)
        assert a.overlaps(Span(((2, 3),)))

    @given(st.lists(st.integers(min_value=0, max_value=60), max_size=25))
    def test_from_indices_round_trips(self, indices):
        assert list(Span.from_indices(indices).indices()) == sorted(set(indices))


class TestDirection:
    def test_labels(self):
        assert Direction.ONE_TO_TWO.label == "1>2"
        assert Direction.TWO_TO_ONE.label == "1<2"

    def test_from_label_round_trip(self):
        for d in Direction:
            assert Direction.from_label(d.label) is d

    def test_from_label_rejects_garbage(self):
        with pytest.raises(IntegrityError):
            Direction.from_label("2>1")


class TestRelationViews:
    def test_source_follows_direction(self, demo_ds):
        r0, r1 = demo_ds.relations[0], demo_ds.relations[1]
        assert r0.direction is Direction.ONE_TO_TWO
        assert r0.source() == r0.arg1 and r0.target() == r0.arg2
        assert r1.direction is Direction.TWO_TO_ONE
        assert r1.source() == r1.arg2 and r1.target() == r1.arg1

    def test_window_spans_whole_sentences(self, demo_ds):
        r1 = demo_ds.relations[1]
        assert relation_sentence_window(r1, demo_ds).ranges == ((0, 13),)
        assert r1.window().ranges == ((0, 13),)

    def test_window_excludes_untouched_sentences(self, demo_ds):
        r3 = demo_ds.relations[3]
        assert r3.window().ranges == ((6, 10),)


class TestDatasetCounts:
    def test_token_and_sentence_counts(self, demo_ds):
        assert demo_ds.token_count == 25
        assert demo_ds.sentence_count == 4
        assert demo_ds.doc_lengths == {"GUM_news_flood": 14,
                                       "GUM_interview_cats": 11}

    def test_inventories(self, demo_ds):
        assert demo_ds.disrpt_labels == ["CONDITION", "ELABORATION", "PURPOSE"]
        assert demo_ds.signal_types == ["dm", "syntactic"]
        assert demo_ds.signal_subtypes == ["dm"]
        assert demo_ds.metadata_keys == ["genre", "split"]
        assert "SCONJ" in demo_ds.upos_vocab
        assert "advcl:pred" in demo_ds.deprel_vocab
