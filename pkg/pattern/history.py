#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
呈现历史记录模块：记录每次输入模式呈现对各模式实例的影响，用于命令行摘要与回放核对。
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import json


@dataclass
class InstanceDelta:
    """单个实例在一次呈现中的变化"""
    pattern_id: int
    shared: List[int] = field(default_factory=list)   # 输入中出现的成员（正向更新）
    blue: List[int] = field(default_factory=list)     # 未出现的成员（权重递减，仅群体计数增加）
    created: bool = False                              # 是否为本次新建的实例

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"pattern_id": self.pattern_id, "shared": self.shared}
        if self.blue:
            d["blue"] = self.blue
        if self.created:
            d["created"] = True
        return d


@dataclass
class PresentationRecord:
    """一次呈现记录（紧凑导出）"""
    seq: int                                  # 呈现序号（从1开始）
    timestamp: int                            # 输入模式时间戳 t
    nodes: Tuple[int, ...]                    # 输入节点（升序）
    deltas: List[InstanceDelta] = field(default_factory=list)
    best_overlap: float = 0.0                 # 新建判定前的最大重叠比例

    @property
    def created_id(self) -> Optional[int]:
        for d in self.deltas:
            if d.created:
                return d.pattern_id
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seq": self.seq,
            "t": self.timestamp,
            "nodes": list(self.nodes),
            "best_overlap": round(self.best_overlap, 6),
            "deltas": [d.to_dict() for d in self.deltas],
        }


class HistoryRecorder:
    """呈现历史记录器"""
    def __init__(self) -> None:
        self.records: List[PresentationRecord] = []

    def next_seq(self) -> int:
        return len(self.records) + 1

    def add_record(self, record: PresentationRecord) -> None:
        self.records.append(record)

    def to_list(self) -> List[Dict[str, Any]]:
        return [r.to_dict() for r in self.records]

    def to_json(self, ensure_ascii: bool = False) -> str:
        return json.dumps(self.to_list(), ensure_ascii=ensure_ascii)
