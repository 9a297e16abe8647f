import math

import pytest

from pattern.errors import EmptyPatternError, PatternError
from pattern.node import CountRecord, InputPattern, check_node_id
from pattern.store import PatternStore, create_pattern, overlap, overlap_fraction


class TestNodeTypes:
    def test_node_id_must_be_non_negative_int(self):
        assert check_node_id(0) == 0
        for bad in (-1, 1.5, True, "3"):
            with pytest.raises(ValueError):
                check_node_id(bad)

    def test_input_pattern_drops_zero_signals(self):
        ip = InputPattern({1: 1.0, 2: 0.0, 3: -0.5}, timestamp=4)
        assert ip.nodes() == {1, 3}
        assert ip.signal(2) == 0.0
        assert ip.signal(3) == -0.5
        assert not ip.is_empty()
        assert InputPattern({7: 0.0}).is_empty()

    def test_input_pattern_rejects_non_finite(self):
        with pytest.raises(ValueError):
            InputPattern({1: math.nan})
        with pytest.raises(ValueError):
            InputPattern({1: math.inf})

    def test_count_record_validity_and_gap(self):
        rec = CountRecord(reinforcement=1.0, individual_count=2.0, group_count=5.0)
        assert rec.is_valid()
        assert rec.gap() == 3.0
        assert not CountRecord(individual_count=-1.0).is_valid()
        assert not CountRecord(group_count=math.nan).is_valid()


class TestCreatePattern:
    def test_zeroed_records_for_every_member(self):
        p = create_pattern([3, 1, 2], pattern_id=9)
        assert p.pattern_id == 9
        assert p.sorted_members() == [1, 2, 3]
        assert p.group_events == 0
        assert all(r.as_tuple() == (0.0, 0.0, 0.0) for r in p.records.values())
        assert p.is_consistent()

    def test_empty_node_set_rejected(self):
        with pytest.raises(EmptyPatternError):
            create_pattern([])

    def test_duplicate_nodes_collapse(self):
        assert create_pattern([1, 1, 2]).sorted_members() == [1, 2]

    def test_record_of_non_member(self):
        with pytest.raises(PatternError):
            create_pattern([1]).record(2)


class TestOverlap:
    def test_overlap_and_fraction(self):
        p = create_pattern([1, 2, 3])
        ip = InputPattern.of([2, 3, 4])
        assert overlap(p, ip) == {2, 3}
        # |{2,3}| / |{1,2,3,4}|
        assert overlap_fraction(p, ip) == 0.5

    def test_identical_input_has_full_overlap(self):
        p = create_pattern([1, 2])
        assert overlap_fraction(p, InputPattern.of([1, 2])) == 1.0

    def test_disjoint_input(self):
        p = create_pattern([1, 2])
        ip = InputPattern.of([5])
        assert overlap(p, ip) == set()
        assert overlap_fraction(p, ip) == 0.0


class TestPatternStore:
    def test_ids_are_assigned_in_order(self):
        store = PatternStore()
        a = store.add_pattern([1, 2])
        b = store.add_pattern([2, 3])
        assert (a.pattern_id, b.pattern_id) == (1, 2)
        assert store.next_pattern_id == 3
        assert [p.pattern_id for p in store.ordered()] == [1, 2]
        assert store.get(2) is b
        assert store.get(5) is None
        assert store.all_nodes() == {1, 2, 3}
        assert len(store) == 2

    def test_shared_node_has_independent_records(self):
        store = PatternStore()
        a = store.add_pattern([1, 2])
        b = store.add_pattern([2, 3])
        a.records[2].individual_count = 4.0
        assert b.records[2].individual_count == 0.0

    def test_clock_never_moves_backwards(self):
        store = PatternStore()
        store.advance_clock(5)
        store.advance_clock(3)
        assert store.clock == 5
