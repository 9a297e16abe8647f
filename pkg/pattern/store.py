#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
模式存储模块：节点在模式之间共享，但每个模式实例为其成员各自保存一套带索引的计数。
"""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set

from .errors import EmptyPatternError, PatternError
from .node import CountRecord, InputPattern, NodeId, check_node_id


@dataclass
class PatternInstance:
    """模式实例 P_p：成员集合、逐节点计数记录与群体事件计数 N_g"""
    pattern_id: int
    members: Set[NodeId] = field(default_factory=set)
    records: Dict[NodeId, CountRecord] = field(default_factory=dict)
    group_events: int = 0

    def record(self, node_id: NodeId) -> CountRecord:
        rec = self.records.get(node_id)
        if rec is None:
            raise PatternError(f"node {node_id} is not a member of pattern {self.pattern_id}")
        return rec

    def sorted_members(self) -> List[NodeId]:
        return sorted(self.members)

    def individual_counts(self) -> List[float]:
        """按节点ID升序返回个体计数 CI。"""
        return [self.records[n].individual_count for n in self.sorted_members()]

    def group_counts(self) -> List[float]:
        return [self.records[n].group_count for n in self.sorted_members()]

    def reinforcements(self) -> List[float]:
        return [self.records[n].reinforcement for n in self.sorted_members()]

    def is_consistent(self) -> bool:
        """记录键集合与成员集合一致，且每条记录合法。"""
        return set(self.records.keys()) == self.members and all(r.is_valid() for r in self.records.values())


def create_pattern(nodes: Iterable[NodeId], pattern_id: int = 0) -> PatternInstance:
    """以节点集合新建模式实例，所有计数清零，N_g = 0。"""
    members = {check_node_id(n) for n in nodes}
    if not members:
        raise EmptyPatternError("cannot create a pattern from an empty node set")
    return PatternInstance(
        pattern_id=pattern_id,
        members=members,
        records={n: CountRecord() for n in members},
        group_events=0,
    )


def overlap(p: PatternInstance, ip: InputPattern) -> Set[NodeId]:
    """返回模式成员中在输入里具有非零信号的节点。"""
    return {n for n in p.members if ip.signal(n) != 0.0}


def overlap_fraction(p: PatternInstance, ip: InputPattern) -> float:
    """重叠比例：|交集| / |并集|，仅当输入与实例完全一致时为 1。"""
    union = p.members | ip.nodes()
    if not union:
        return 0.0
    return len(overlap(p, ip)) / len(union)


@dataclass
class PatternStore:
    """模式存储：按ID保存全部实例，维护下一个可用ID与全局时钟 t"""
    patterns: Dict[int, PatternInstance] = field(default_factory=dict)
    next_pattern_id: int = 1
    clock: int = 0

    def add_pattern(self, nodes: Iterable[NodeId]) -> PatternInstance:
        """分配新ID并登记一个清零的模式实例。"""
        inst = create_pattern(nodes, pattern_id=self.next_pattern_id)
        self.patterns[inst.pattern_id] = inst
        self.next_pattern_id += 1
        return inst

    def get(self, pattern_id: int) -> Optional[PatternInstance]:
        return self.patterns.get(pattern_id)

    def ordered(self) -> List[PatternInstance]:
        """按ID升序返回实例。"""
        return [self.patterns[k] for k in sorted(self.patterns)]

    def advance_clock(self, timestamp: int) -> None:
        # 时钟单调不减
        if timestamp > self.clock:
            self.clock = timestamp

    def all_nodes(self) -> Set[NodeId]:
        nodes: Set[NodeId] = set()
        for inst in self.patterns.values():
            nodes |= inst.members
        return nodes

    def __len__(self) -> int:
        return len(self.patterns)
