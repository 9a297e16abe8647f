import pytest

from pattern.node import CountRecord
from pattern.store import PatternInstance, PatternStore


def make_instance(pattern_id, counts, group_count, group_events, reinforcement=None):
    """counts: {node: CI}；全部成员共享同一个 CG。"""
    inst = PatternInstance(pattern_id=pattern_id, group_events=group_events)
    for nid, ci in counts.items():
        r = 0.0 if reinforcement is None else reinforcement[nid]
        inst.members.add(nid)
        inst.records[nid] = CountRecord(reinforcement=r, individual_count=float(ci), group_count=float(group_count))
    return inst


@pytest.fixture
def worked_instance():
    # 五节点算例：CI = 2,4,2,4,3，N_g = CG = 5
    return make_instance(1, {1: 2, 2: 4, 3: 2, 4: 4, 5: 3}, group_count=5, group_events=5)


@pytest.fixture
def worked_store(worked_instance):
    store = PatternStore(next_pattern_id=2, clock=5)
    store.patterns[1] = worked_instance
    return store
