#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
节点与计数记录定义
"""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, Iterable, Set, Tuple
import math

# 节点ID：非负整数，在同一存储内唯一
NodeId = int


def check_node_id(node_id: int) -> int:
    """校验节点ID为非负整数并返回。"""
    if isinstance(node_id, bool) or not isinstance(node_id, int) or node_id < 0:
        raise ValueError(f"node id must be a non-negative integer, got {node_id!r}")
    return node_id


@dataclass
class CountRecord:
    """单个节点在某一模式实例中的计数记录"""
    reinforcement: float = 0.0     # 强化权重 R
    individual_count: float = 0.0  # 个体计数 CI
    group_count: float = 0.0       # 群体计数 CG

    def is_valid(self) -> bool:
        """三项均为有限非负实数。"""
        return all(math.isfinite(v) and v >= 0.0 for v in self.as_tuple())

    def gap(self) -> float:
        """群体计数与个体计数之差（CG − CI）。"""
        return self.group_count - self.individual_count

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.reinforcement, self.individual_count, self.group_count)


@dataclass
class InputPattern:
    """一次呈现的输入模式：节点 -> 信号值，附带离散时间戳"""
    signals: Dict[NodeId, float] = field(default_factory=dict)
    timestamp: int = 0

    def __post_init__(self) -> None:
        # 信号为 0 等同于节点缺席，不保存
        cleaned: Dict[NodeId, float] = {}
        for nid, value in self.signals.items():
            check_node_id(nid)
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"signal for node {nid} is not finite")
            if value != 0.0:
                cleaned[nid] = value
        self.signals = cleaned

    @classmethod
    def of(cls, nodes: Iterable[NodeId], timestamp: int = 0) -> "InputPattern":
        """以单位信号构造输入模式。"""
        return cls({nid: 1.0 for nid in nodes}, timestamp)

    def nodes(self) -> Set[NodeId]:
        return set(self.signals.keys())

    def signal(self, node_id: NodeId) -> float:
        return self.signals.get(node_id, 0.0)

    def is_empty(self) -> bool:
        return not self.signals
