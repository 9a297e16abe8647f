#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
内聚度量模块
- 节点级：计数差判定（CG − CI）/ N_g < Δ，以及权重差判定 |R_i − R_j| < Δ；
- 模式级：Var 系数 × 计数因子 CF = Coh，1.0 为最佳，可为负值。
离散度默认采用算例口径 sqrt(Σ(c − lav)²) / n，而非教科书标准差。
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from pattern.errors import CohesionError
from pattern.node import NodeId
from pattern.store import PatternInstance


class SpreadMode(Enum):
    """离散度口径"""
    WORKED = "worked"      # sqrt(Σ 偏差²) / n
    TEXTBOOK = "textbook"  # sqrt(Σ 偏差² / n)，总体标准差


class FactorMode(Enum):
    """计数因子口径"""
    COUNT_RATIO = "count"            # 局部均值 / 全局均值
    REINFORCEMENT = "reinforcement"  # 平均强化权重 R


@dataclass(frozen=True)
class CohesionThreshold:
    delta: float = 0.5   # 允许差 Δ

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise CohesionError(f"delta must be finite and > 0, got {self.delta}")


@dataclass(frozen=True)
class CohesionReport:
    var_coefficient: float
    count_factor: float
    cohesion: float
    local_mean: float
    global_mean: float

    def to_dict(self) -> dict:
        return {
            "var": self.var_coefficient,
            "cf": self.count_factor,
            "coh": self.cohesion,
            "lav": self.local_mean,
            "gav": self.global_mean,
        }


# --- 节点级 ---

def node_cohesion_count(p: PatternInstance, n: NodeId, thr: CohesionThreshold) -> bool:
    """计数差判定：(CG − CI) / N_g < Δ 为内聚。"""
    return node_count_gap(p, n) < thr.delta


def node_count_gap(p: PatternInstance, n: NodeId) -> float:
    if p.group_events <= 0:
        raise CohesionError(f"pattern {p.pattern_id} has no group events, count gap undefined")
    rec = p.record(n)
    return rec.gap() / p.group_events


def node_cohesion_weight(p: PatternInstance, i: NodeId, j: NodeId, thr: CohesionThreshold) -> bool:
    """权重差判定：|R_i − R_j| < Δ，对 i/j 对称。"""
    return abs(p.record(i).reinforcement - p.record(j).reinforcement) < thr.delta


def node_verdicts(p: PatternInstance, thr: CohesionThreshold) -> List[Tuple[NodeId, float, bool]]:
    """按节点ID升序返回 (节点, 计数差, 是否内聚)。"""
    result = []
    for nid in p.sorted_members():
        gap = node_count_gap(p, nid)
        result.append((nid, gap, gap < thr.delta))
    return result


def weight_cohesive_groups(p: PatternInstance, thr: CohesionThreshold) -> List[Set[NodeId]]:
    """按强化权重聚组：成员按 (R, ID) 排序后贪心成组，组内任意两点满足权重差判定。"""
    ordered = sorted(p.members, key=lambda n: (p.records[n].reinforcement, n))
    groups: List[Set[NodeId]] = []
    anchor = None
    for nid in ordered:
        r = p.records[nid].reinforcement
        if anchor is None or r - anchor >= thr.delta:
            groups.append(set())
            anchor = r
        groups[-1].add(nid)
    return groups


# --- 模式级 ---

def _spread(values: np.ndarray, local_mean: float, mode: SpreadMode) -> float:
    # 排序后求和，相同多重集得到逐位相同的结果
    dev = np.sort(values) - local_mean
    ss = float(np.sum(dev * dev))
    n = values.size
    if mode is SpreadMode.TEXTBOOK:
        return math.sqrt(ss / n)
    return math.sqrt(ss) / n


def variance_coefficient(counts: Sequence[float], local_mean: float, mode: SpreadMode = SpreadMode.WORKED) -> float:
    """Var = 1 − 离散度 / 局部均值。"""
    values = np.asarray(counts, dtype=float)
    if values.size == 0:
        raise CohesionError("counts must not be empty")
    if not (math.isfinite(local_mean) and local_mean > 0):
        raise CohesionError(f"local mean must be > 0, got {local_mean}")
    return 1.0 - _spread(values, local_mean, mode) / local_mean


def count_factor(local_mean: float, global_mean: float) -> float:
    """CF = 局部均值 / 全局均值。"""
    if not (math.isfinite(global_mean) and global_mean > 0):
        raise CohesionError(f"global mean must be > 0, got {global_mean}")
    return local_mean / global_mean


def reinforcement_factor(weights: Sequence[float]) -> float:
    """CF 的另一口径：平均强化权重。"""
    if len(weights) == 0:
        raise CohesionError("weights must not be empty")
    return float(np.mean(np.asarray(weights, dtype=float)))


def pattern_cohesion(
    counts: Sequence[float],
    local_mean: float,
    global_mean: float,
    spread: SpreadMode = SpreadMode.WORKED,
    factor: Optional[float] = None,
) -> CohesionReport:
    """Coh = Var × CF。factor 给定时替代计数比（用于平均 R 口径）。"""
    var = variance_coefficient(counts, local_mean, spread)
    cf = count_factor(local_mean, global_mean) if factor is None else factor
    return CohesionReport(
        var_coefficient=var,
        count_factor=cf,
        cohesion=var * cf,
        local_mean=local_mean,
        global_mean=global_mean,
    )


def signed_pattern_cohesion(
    values: Sequence[float],
    local_mean: float,
    global_mean: float,
    spread: SpreadMode = SpreadMode.WORKED,
) -> CohesionReport:
    """实数值口径：均值可为零或负。

    两个均值都为正时与 pattern_cohesion 一致；否则 Coh = (lav − 离散度) / gav，
    即 Var × CF 展开后的形式，lav = 0 时 Var 记为 NaN。gav = 0 时无定义。
    """
    if local_mean > 0 and global_mean > 0:
        return pattern_cohesion(values, local_mean, global_mean, spread=spread)
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise CohesionError("values must not be empty")
    if not (math.isfinite(local_mean) and math.isfinite(global_mean)):
        raise CohesionError(f"means must be finite, got lav={local_mean} gav={global_mean}")
    if global_mean == 0.0:
        raise CohesionError(f"global mean is 0 with local mean {local_mean}, cohesion undefined")
    s = _spread(arr, local_mean, spread)
    cf = local_mean / global_mean
    if local_mean == 0.0:
        return CohesionReport(float("nan"), cf, -s / global_mean, local_mean, global_mean)
    var = 1.0 - s / local_mean
    return CohesionReport(var, cf, var * cf, local_mean, global_mean)


def instance_cohesion(
    p: PatternInstance,
    spread: SpreadMode = SpreadMode.WORKED,
    factor_mode: FactorMode = FactorMode.COUNT_RATIO,
) -> CohesionReport:
    """模式实例的整体内聚：CI 为局部计数，CG 均值作为全局计数（群体计数即全局模式规模）。"""
    if p.group_events <= 0:
        raise CohesionError(f"pattern {p.pattern_id} has no group events")
    ci = p.individual_counts()
    lav = float(np.mean(ci))
    gav = float(np.mean(p.group_counts()))
    factor = reinforcement_factor(p.reinforcements()) if factor_mode is FactorMode.REINFORCEMENT else None
    return pattern_cohesion(ci, lav, gav, spread=spread, factor=factor)
