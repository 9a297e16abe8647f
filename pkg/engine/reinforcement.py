#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
强化与计数机制模块：输入模式呈现到相关模式实例时，
- 共享节点：强化权重 R、个体计数 CI、群体计数 CG 均正向更新；
- 未出现的成员（蓝色节点）：权重 R 递减（截断于 0），仅群体计数 CG 增加；
- 每个被触及的实例群体事件数 N_g 加 1。
衰减为乘法、仅在显式调用时执行，保证测试可复现。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from pattern.errors import EmptyPatternError, PatternError
from pattern.history import HistoryRecorder, InstanceDelta, PresentationRecord
from pattern.node import InputPattern
from pattern.store import PatternInstance, PatternStore, overlap, overlap_fraction

logger = logging.getLogger("pattern_cohesion.present")


@dataclass
class UpdateConfig:
    omega_i: float = 1.0                          # 个体增量 ω_i
    omega_g: float = 1.0                          # 群体增量 ω_G
    decay_factor: float = 1.0                     # 1.0 表示关闭衰减
    new_instance_overlap_threshold: float = 1.0   # 最大重叠比例低于该值时新建实例
    signal_scaled: bool = False                   # 强化量是否按输入信号缩放

    def validate(self) -> "UpdateConfig":
        if not (math.isfinite(self.omega_i) and self.omega_i > 0):
            raise PatternError(f"omega_i must be > 0, got {self.omega_i}")
        if not (math.isfinite(self.omega_g) and self.omega_g > 0):
            raise PatternError(f"omega_g must be > 0, got {self.omega_g}")
        if not (0.0 < self.decay_factor <= 1.0):
            raise PatternError(f"decay_factor must be in (0, 1], got {self.decay_factor}")
        if not (0.0 <= self.new_instance_overlap_threshold <= 1.0):
            raise PatternError(f"overlap threshold must be in [0, 1], got {self.new_instance_overlap_threshold}")
        return self

    @property
    def decay_enabled(self) -> bool:
        return self.decay_factor < 1.0


def reinforce(p: PatternInstance, ip: InputPattern, cfg: UpdateConfig) -> PatternInstance:
    """基础强化：输入中出现的成员 R += ω_i（信号缩放模式下乘以信号值）。"""
    for nid in overlap(p, ip):
        rec = p.records[nid]
        inc = cfg.omega_i * ip.signal(nid) if cfg.signal_scaled else cfg.omega_i
        rec.reinforcement = max(0.0, rec.reinforcement + inc)
    return p


def update_counts(p: PatternInstance, ip: InputPattern, cfg: UpdateConfig) -> bool:
    """计数机制：交集成员 CI += ω_i，全体成员 CG += ω_G，N_g += 1。
    输入与实例无交集时不做任何修改并返回 False，由调用方决定是否新建实例。"""
    shared = overlap(p, ip)
    if not shared:
        return False
    for nid in shared:
        p.records[nid].individual_count += cfg.omega_i
    # 群体更新对整组一致
    for rec in p.records.values():
        rec.group_count += cfg.omega_g
    p.group_events += 1
    return True


def _weaken_absent(p: PatternInstance, absent: List[int], cfg: UpdateConfig) -> None:
    # 递减幅度与增量对称，截断于 0
    for nid in absent:
        rec = p.records[nid]
        rec.reinforcement = max(0.0, rec.reinforcement - cfg.omega_i)


def present(
    store: PatternStore,
    ip: InputPattern,
    cfg: Optional[UpdateConfig] = None,
    history: Optional[HistoryRecorder] = None,
) -> PatternStore:
    """将一次输入模式呈现到存储中的全部相关实例（原地更新并返回存储）。"""
    cfg = cfg or UpdateConfig()
    if ip.is_empty():
        raise EmptyPatternError("input pattern has no non-zero signals")
    store.advance_clock(ip.timestamp)

    touched: List[Tuple[PatternInstance, List[int], List[int]]] = []
    best = 0.0
    for inst in store.ordered():
        shared = overlap(inst, ip)
        if not shared:
            continue
        best = max(best, overlap_fraction(inst, ip))
        absent = sorted(inst.members - shared)
        touched.append((inst, sorted(shared), absent))

    deltas: List[InstanceDelta] = []
    for inst, shared, absent in touched:
        reinforce(inst, ip, cfg)
        _weaken_absent(inst, absent, cfg)
        update_counts(inst, ip, cfg)
        deltas.append(InstanceDelta(pattern_id=inst.pattern_id, shared=shared, blue=absent))

    # 无任何实例被触及时总是新建，否则按阈值判定
    if not touched or best < cfg.new_instance_overlap_threshold:
        inst = store.add_pattern(ip.nodes())
        reinforce(inst, ip, cfg)
        update_counts(inst, ip, cfg)
        deltas.append(InstanceDelta(pattern_id=inst.pattern_id, shared=inst.sorted_members(), created=True))

    logger.debug(
        f"[PRESENT] t={ip.timestamp} nodes={len(ip.signals)} touched={len(touched)} "
        f"best_overlap={round(best, 4)} created={deltas[-1].created if deltas else False}"
    )
    if history is not None:
        history.add_record(
            PresentationRecord(
                seq=history.next_seq(),
                timestamp=ip.timestamp,
                nodes=tuple(sorted(ip.signals)),
                deltas=deltas,
                best_overlap=best,
            )
        )
    return store


def decay(store: PatternStore, cfg: Optional[UpdateConfig] = None) -> PatternStore:
    """时间衰减：全部强化权重乘以 decay_factor；计数与 N_g 不变。"""
    cfg = cfg or UpdateConfig()
    if not cfg.decay_enabled:
        return store
    for inst in store.patterns.values():
        for rec in inst.records.values():
            rec.reinforcement *= cfg.decay_factor
    return store
