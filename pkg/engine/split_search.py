from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from engine.cohesion import (
    CohesionReport,
    CohesionThreshold,
    SpreadMode,
    instance_cohesion,
    node_verdicts,
    pattern_cohesion,
)
from pattern.errors import SplitError
from pattern.node import NodeId
from pattern.store import PatternInstance


logger = logging.getLogger("pattern_cohesion.search")

Part = FrozenSet[NodeId]


@dataclass
class SplitConfig:
    spread: SpreadMode = SpreadMode.WORKED
    max_brute_force_members: int = 12


@dataclass(frozen=True)
class SplitPartition:
    parts: Tuple[Part, ...]

    @classmethod
    def of(cls, *parts: Iterable[NodeId]) -> "SplitPartition":
        # 规范序：先按规模，再按排序后的成员
        frozen = [frozenset(p) for p in parts]
        frozen.sort(key=lambda p: (len(p), tuple(sorted(p))))
        return cls(tuple(frozen))

    def key(self) -> Tuple[Tuple[NodeId, ...], ...]:
        return tuple(tuple(sorted(p)) for p in self.parts)

    def validate(self, members: Iterable[NodeId]) -> None:
        expected = set(members)
        seen: set = set()
        for part in self.parts:
            if not part:
                raise SplitError("partition contains an empty part")
            if seen & part:
                raise SplitError(f"parts overlap on nodes {sorted(seen & part)}")
            seen |= part
        if seen != expected:
            missing = sorted(expected - seen)
            extra = sorted(seen - expected)
            raise SplitError(f"partition does not cover the pattern (missing={missing}, extra={extra})")


@dataclass
class SplitEvaluation:
    per_part: List[CohesionReport] = field(default_factory=list)
    composite: float = 0.0
    remainder_cohesion: float = 0.0
    sizes: List[int] = field(default_factory=list)


@dataclass
class SplitSearchResult:
    best: Optional[SplitPartition] = None
    evaluation: Optional[SplitEvaluation] = None
    explored: int = 0


def recalc_stats(counts: Sequence[float]) -> Tuple[float, float]:
    """拆分后重算：局部均值取算术平均，全局均值取最大实际计数。"""
    values = np.asarray(counts, dtype=float)
    if values.size == 0:
        raise SplitError("counts must not be empty")
    if np.any(values < 0):
        raise SplitError("counts must be non-negative")
    return float(np.mean(values)), float(np.max(values))


def _score_part(values: Sequence[float], spread: SpreadMode) -> CohesionReport:
    lav, gav = recalc_stats(values)
    if len(values) == 1:
        # 单节点部分恒为完全内聚，计数为 0 亦然
        return CohesionReport(1.0, 1.0, 1.0, lav, gav)
    if gav == 0.0:
        # 全零计数的部分视为最差内聚
        return CohesionReport(0.0, 0.0, 0.0, 0.0, 0.0)
    return pattern_cohesion(sorted(values), lav, gav, spread=spread)


def evaluate_split(
    pattern_counts: Mapping[NodeId, float],
    partition: SplitPartition,
    spread: SpreadMode = SpreadMode.WORKED,
) -> SplitEvaluation:
    """逐部分重算均值并打分；综合分为按部分规模加权的平均内聚。"""
    partition.validate(pattern_counts.keys())
    reports: List[CohesionReport] = []
    sizes: List[int] = []
    for part in partition.parts:
        reports.append(_score_part([pattern_counts[n] for n in part], spread))
        sizes.append(len(part))
    total = sum(sizes)
    composite = sum(s * r.cohesion for s, r in zip(sizes, reports)) / total
    # 余下部分 = 规模最大的部分；同规模时取规范序靠后者（即含较大ID的那一部分）
    largest = max(range(len(sizes)), key=lambda k: (sizes[k], k))
    return SplitEvaluation(per_part=reports, composite=composite, remainder_cohesion=reports[largest].cohesion, sizes=sizes)


def rank_single_removals(
    pattern_counts: Mapping[NodeId, float],
    spread: SpreadMode = SpreadMode.WORKED,
) -> List[Tuple[NodeId, SplitEvaluation]]:
    """枚举所有单节点移除，按余下部分内聚降序、节点ID升序排列。"""
    if len(pattern_counts) < 2:
        raise SplitError("a pattern needs at least 2 nodes to be split")
    members = sorted(pattern_counts)
    ranked: List[Tuple[NodeId, SplitEvaluation]] = []
    for nid in members:
        rest = [m for m in members if m != nid]
        ev = evaluate_split(pattern_counts, SplitPartition.of([nid], rest), spread)
        ranked.append((nid, ev))
    ranked.sort(key=lambda item: (-item[1].remainder_cohesion, item[0]))
    return ranked


def instance_counts(p: PatternInstance) -> Dict[NodeId, float]:
    return {n: p.records[n].individual_count for n in p.sorted_members()}


def suggest_split(
    p: PatternInstance,
    thr: CohesionThreshold,
    spread: SpreadMode = SpreadMode.WORKED,
) -> Optional[SplitPartition]:
    """按计数差判定把成员分为内聚/非内聚两组；两侧非空且综合分优于原模式时给出划分。"""
    verdicts = node_verdicts(p, thr)
    cohesive = [n for n, _, ok in verdicts if ok]
    outliers = [n for n, _, ok in verdicts if not ok]
    if not cohesive or not outliers:
        return None
    partition = SplitPartition.of(cohesive, outliers)
    ev = evaluate_split(instance_counts(p), partition, spread)
    unsplit = instance_cohesion(p, spread=spread).cohesion
    logger.info(
        f"[SPLIT] pattern={p.pattern_id} cohesive={len(cohesive)} outliers={len(outliers)} "
        f"composite={round(ev.composite, 4)} unsplit={round(unsplit, 4)}"
    )
    if ev.composite > unsplit:
        return partition
    return None


def _two_part_partitions(members: List[NodeId], removal_only: bool) -> Iterator[SplitPartition]:
    first, others = members[0], members[1:]
    k = len(others)
    for mask in range(0, (1 << k) - 1):
        side = [first] + [others[b] for b in range(k) if mask & (1 << b)]
        rest = [others[b] for b in range(k) if not mask & (1 << b)]
        if removal_only and min(len(side), len(rest)) != 1:
            continue
        yield SplitPartition.of(side, rest)


def brute_force_best_split(
    pattern_counts: Mapping[NodeId, float],
    config: Optional[SplitConfig] = None,
    removal_only: bool = False,
) -> Tuple[SplitPartition, SplitEvaluation]:
    """穷举全部二分划分，返回综合分最高者；同分时取规范序字典序最小的划分。"""
    cfg = config or SplitConfig()
    members = sorted(pattern_counts)
    if len(members) < 2:
        raise SplitError("a pattern needs at least 2 nodes to be split")
    if len(members) > cfg.max_brute_force_members:
        raise SplitError(f"brute force limited to {cfg.max_brute_force_members} members, got {len(members)}")
    start = time.time()
    result = SplitSearchResult()
    for partition in _two_part_partitions(members, removal_only):
        ev = evaluate_split(pattern_counts, partition, cfg.spread)
        result.explored += 1
        if result.evaluation is None or ev.composite > result.evaluation.composite or (
            ev.composite == result.evaluation.composite and partition.key() < result.best.key()
        ):
            result.best, result.evaluation = partition, ev
    logger.debug(
        f"[SPLIT] brute force finished: members={len(members)}, explored={result.explored}, "
        f"composite={round(result.evaluation.composite, 4)}, elapsed_ms={round((time.time() - start) * 1000.0, 2)}"
    )
    return result.best, result.evaluation
