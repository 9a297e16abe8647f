import numpy as np
import pytest

from engine.reinforcement import UpdateConfig, decay, present, reinforce, update_counts
from pattern.errors import EmptyPatternError, PatternError
from pattern.history import HistoryRecorder
from pattern.node import InputPattern
from pattern.store import PatternStore, create_pattern


class TestUpdateCounts:
    def test_shared_and_absent_members(self):
        p = create_pattern([1, 2, 3, 4], pattern_id=1)
        assert update_counts(p, InputPattern.of([1, 2, 9]), UpdateConfig())
        assert [p.records[n].individual_count for n in (1, 2, 3, 4)] == [1.0, 1.0, 0.0, 0.0]
        assert [p.records[n].group_count for n in (1, 2, 3, 4)] == [1.0, 1.0, 1.0, 1.0]
        assert p.group_events == 1

    def test_disjoint_input_leaves_instance_untouched(self):
        p = create_pattern([1, 2])
        assert not update_counts(p, InputPattern.of([5]), UpdateConfig())
        assert p.group_events == 0
        assert all(r.as_tuple() == (0.0, 0.0, 0.0) for r in p.records.values())

    def test_custom_increments(self):
        p = create_pattern([1, 2])
        update_counts(p, InputPattern.of([1]), UpdateConfig(omega_i=0.5, omega_g=2.0))
        assert p.records[1].individual_count == 0.5
        assert p.records[2].group_count == 2.0

    def test_signal_scaled_reinforcement(self):
        p = create_pattern([1, 2])
        reinforce(p, InputPattern({1: 3.0, 2: 0.5}), UpdateConfig(signal_scaled=True))
        assert p.records[1].reinforcement == 3.0
        assert p.records[2].reinforcement == 0.5


class TestPresent:
    def test_fresh_store_creates_one_instance(self):
        store = present(PatternStore(), InputPattern.of([1, 2, 3], timestamp=4))
        assert len(store) == 1
        inst = store.get(1)
        assert inst.group_events == 1
        assert all(r.as_tuple() == (1.0, 1.0, 1.0) for r in inst.records.values())
        assert store.clock == 4

    def test_partial_overlap_reinforces_and_weakens(self):
        store = PatternStore()
        present(store, InputPattern.of([1, 2, 3, 4], timestamp=1))
        history = HistoryRecorder()
        present(store, InputPattern.of([1, 2], timestamp=2), history=history)
        old = store.get(1)
        assert [old.records[n].individual_count for n in (1, 2, 3, 4)] == [2.0, 2.0, 1.0, 1.0]
        assert [old.records[n].group_count for n in (1, 2, 3, 4)] == [2.0] * 4
        assert [old.records[n].reinforcement for n in (1, 2, 3, 4)] == [2.0, 2.0, 0.0, 0.0]
        assert old.group_events == 2
        # 重叠比例 2/4 低于默认阈值 1.0，另建一个实例
        assert len(store) == 2
        assert store.get(2).sorted_members() == [1, 2]
        rec = history.records[0]
        assert rec.best_overlap == 0.5
        assert rec.created_id == 2
        assert rec.deltas[0].shared == [1, 2] and rec.deltas[0].blue == [3, 4]

    def test_reinforcement_is_clamped_at_zero(self):
        store = PatternStore()
        present(store, InputPattern.of([1, 2], timestamp=1))
        for t in range(2, 6):
            present(store, InputPattern.of([1], timestamp=t), UpdateConfig(new_instance_overlap_threshold=0.0))
        assert store.get(1).records[2].reinforcement == 0.0
        assert len(store) == 1

    def test_exact_repeat_does_not_create(self):
        store = PatternStore()
        for t in range(3):
            present(store, InputPattern.of([5, 6], timestamp=t))
        assert len(store) == 1
        assert store.get(1).group_events == 3

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyPatternError):
            present(PatternStore(), InputPattern({1: 0.0}))

    def test_history_json(self):
        history = HistoryRecorder()
        present(PatternStore(), InputPattern.of([2, 1], timestamp=3), history=history)
        assert history.to_list() == [
            {"seq": 1, "t": 3, "nodes": [1, 2], "best_overlap": 0.0,
             "deltas": [{"pattern_id": 1, "shared": [1, 2], "created": True}]}
        ]
        assert history.to_json().startswith("[{")


class TestCountingInvariants:
    def test_random_sequences(self):
        rng = np.random.default_rng(1234)
        cfg = UpdateConfig()
        for _ in range(1000):
            store = PatternStore()
            history = HistoryRecorder()
            for t in range(int(rng.integers(1, 9))):
                nodes = rng.choice(10, size=int(rng.integers(1, 5)), replace=False)
                present(store, InputPattern.of((int(n) for n in nodes), timestamp=t), cfg, history)
            touched = {}
            for rec in history.records:
                for d in rec.deltas:
                    touched[d.pattern_id] = touched.get(d.pattern_id, 0) + 1
            for inst in store.patterns.values():
                cg = {r.group_count for r in inst.records.values()}
                assert len(cg) == 1
                assert inst.group_events == touched[inst.pattern_id]
                assert cg == {float(inst.group_events)}
                for r in inst.records.values():
                    assert r.individual_count <= r.group_count
                    assert r.reinforcement >= 0.0


class TestDecay:
    def test_multiplicative_decay(self):
        store = present(PatternStore(), InputPattern.of([1]))
        cfg = UpdateConfig(decay_factor=0.9)
        for _ in range(10):
            decay(store, cfg)
        rec = store.get(1).records[1]
        assert rec.reinforcement == pytest.approx(0.9 ** 10, rel=1e-12)
        assert (rec.individual_count, rec.group_count) == (1.0, 1.0)

    def test_decay_off_is_noop(self):
        store = present(PatternStore(), InputPattern.of([1]))
        decay(store, UpdateConfig())
        assert store.get(1).records[1].reinforcement == 1.0


class TestUpdateConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"omega_i": 0.0},
            {"omega_g": -1.0},
            {"decay_factor": 0.0},
            {"decay_factor": 1.5},
            {"new_instance_overlap_threshold": 1.1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(PatternError):
            UpdateConfig(**kwargs).validate()


class TestWorkedUpdates:
    def test_repeated_partial_input_opens_gap(self):
        p = create_pattern([1, 2, 3], pattern_id=1)
        for _ in range(5):
            update_counts(p, InputPattern.of([1, 2]), UpdateConfig())
        assert p.records[1].individual_count == 5.0
        assert p.records[3].individual_count == 0.0
        assert p.records[3].group_count == 5.0
        assert (p.records[3].group_count - p.records[3].individual_count) / p.group_events == 1.0

    def test_shared_nodes_up_blue_node_down(self):
        store = PatternStore()
        present(store, InputPattern.of([1, 2, 3, 4, 5], timestamp=1))
        present(store, InputPattern.of([1, 2, 3, 4, 9], timestamp=2))
        inst = store.get(1)
        assert [inst.records[n].reinforcement for n in (1, 2, 3, 4, 5)] == [2.0, 2.0, 2.0, 2.0, 0.0]
        assert [inst.records[n].individual_count for n in (1, 2, 3, 4, 5)] == [2.0, 2.0, 2.0, 2.0, 1.0]
        assert {r.group_count for r in inst.records.values()} == {2.0}

    def test_decay_halves(self):
        store = PatternStore()
        inst = store.add_pattern([1, 2])
        inst.records[1].reinforcement = 4.0
        inst.records[2].reinforcement = 2.0
        decay(store, UpdateConfig(decay_factor=0.5))
        assert inst.reinforcements() == [2.0, 1.0]
