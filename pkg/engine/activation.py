#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
模式间激活动力学：离散时间区间上的兴奋/抑制信号台账。
神经元 i 在区间 t 的总输入：
    X_it = Σ_{p∈P_i} E_pt − δ · Σ_{k 活跃模式} Σ_{y≠t} Σ_{j∈P_k, j∉P_i} H_jy
抑制台账在基础模式下是输入数据；反馈模式下已放电模式向自身成员的 H 写入信号。
放电规则（模式成员 X 之和超过阈值，下一区间获得 emit 兴奋）属于仿真外围约定。
"""
from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, IO, Iterable, List, Set, Tuple, Union

from pattern.errors import ActivationError, ScenarioParseError

logger = logging.getLogger("pattern_cohesion.sim")

Ledger = Dict[Tuple[int, int], float]   # (neuron, t) -> value


@dataclass
class ActivationState:
    patterns: List[FrozenSet[int]] = field(default_factory=list)   # 活跃模式 P_1..P_l
    excitatory: Ledger = field(default_factory=dict)               # E
    inhibitory: Ledger = field(default_factory=dict)               # H
    delta: float = 0.5                                             # 抑制权重 δ
    horizon: int = 1                                               # 区间总数 m
    external: Set[int] = field(default_factory=set)                # 不属于任何模式的抑制源
    firing_threshold: float = 0.0
    emit: float = 1.0          # 放电模式成员在下一区间获得的兴奋
    emit_h: float = 1.0        # 反馈模式下放电成员写入的抑制
    feedback: bool = False
    include_self: bool = True  # 兴奋求和是否包含自身

    @property
    def neuron_count(self) -> int:
        nodes: Set[int] = set(self.external)
        for p in self.patterns:
            nodes |= p
        return len(nodes)

    def validate(self) -> "ActivationState":
        if self.horizon < 1:
            raise ActivationError(f"horizon must be >= 1, got {self.horizon}")
        if not math.isfinite(self.delta) or self.delta < 0:
            raise ActivationError(f"delta must be finite and >= 0, got {self.delta}")
        seen: Set[int] = set()
        for idx, p in enumerate(self.patterns):
            if not p:
                raise ActivationError(f"pattern #{idx + 1} is empty")
            if seen & p:
                raise ActivationError(f"pattern #{idx + 1} shares neurons {sorted(seen & p)} with another pattern")
            seen |= p
        if seen & self.external:
            raise ActivationError(f"neurons {sorted(seen & self.external)} are both external and pattern members")
        known = seen | self.external
        for name, ledger in (("E", self.excitatory), ("H", self.inhibitory)):
            for (j, y) in ledger:
                if j not in known:
                    raise ActivationError(f"{name} ledger references unknown neuron {j}")
                if not 1 <= y <= self.horizon:
                    raise ActivationError(f"{name} ledger interval {y} outside 1..{self.horizon}")
        return self

    def pattern_index(self, neuron: int) -> int:
        hits = [k for k, p in enumerate(self.patterns) if neuron in p]
        if len(hits) != 1:
            raise ActivationError(f"neuron {neuron} belongs to {len(hits)} patterns, expected exactly 1")
        return hits[0]


@dataclass
class ActivationTrace:
    x: Dict[Tuple[int, int], float] = field(default_factory=dict)
    fired: Dict[int, List[int]] = field(default_factory=dict)   # t -> 已放电模式下标

    def rows(self) -> List[Tuple[int, int, float]]:
        return [(i, t, v) for (i, t), v in sorted(self.x.items(), key=lambda kv: (kv[0][1], kv[0][0]))]


def excitatory_sum(state: ActivationState, i: int, t: int) -> float:
    members = state.patterns[state.pattern_index(i)]
    total = 0.0
    for p in sorted(members):
        if p == i and not state.include_self:
            continue
        total += state.excitatory.get((p, t), 0.0)
    return total


def inhibitory_sum(state: ActivationState, i: int, t: int) -> float:
    """不含 P_i 成员、不含区间 t 的抑制信号总和（未乘 δ）。"""
    own = state.patterns[state.pattern_index(i)]
    total = 0.0
    for (j, y), h in state.inhibitory.items():
        if y == t or j in own:
            continue
        total += h
    return total


def total_input(state: ActivationState, i: int, t: int) -> float:
    """神经元 i 在区间 t 的总输入 X_it。"""
    if not 1 <= t <= state.horizon:
        raise ActivationError(f"interval {t} outside 1..{state.horizon}")
    return excitatory_sum(state, i, t) - state.delta * inhibitory_sum(state, i, t)


@dataclass
class StepResult:
    x: Dict[Tuple[int, int], float] = field(default_factory=dict)
    fired: List[int] = field(default_factory=list)


def step(state: ActivationState, t: int) -> StepResult:
    """计算区间 t 全部模式神经元的 X，并把放电结果写入台账（原地修改 state）。"""
    if not 1 <= t <= state.horizon:
        raise ActivationError(f"interval {t} outside 1..{state.horizon}")
    result = StepResult()
    sums: List[float] = []
    for members in state.patterns:
        s = 0.0
        for i in sorted(members):
            v = total_input(state, i, t)
            result.x[(i, t)] = v
            s += v
        sums.append(s)
    for k, members in enumerate(state.patterns):
        if sums[k] <= state.firing_threshold:
            continue
        result.fired.append(k)
        for i in members:
            if t + 1 <= state.horizon:
                state.excitatory[(i, t + 1)] = state.excitatory.get((i, t + 1), 0.0) + state.emit
            if state.feedback:
                state.inhibitory[(i, t)] = state.inhibitory.get((i, t), 0.0) + state.emit_h
    logger.debug(f"[SIM] t={t} pattern_sums={[round(s, 4) for s in sums]} fired={result.fired}")
    return result


def run(state: ActivationState) -> ActivationTrace:
    """在状态副本上依次执行 t = 1..m，输入状态保持不变。"""
    sim = copy.deepcopy(state).validate()
    trace = ActivationTrace()
    for t in range(1, sim.horizon + 1):
        res = step(sim, t)
        trace.x.update(res.x)
        trace.fired[t] = res.fired
    logger.info(
        f"[SIM] run finished: patterns={len(sim.patterns)}, neurons={sim.neuron_count}, "
        f"horizon={sim.horizon}, delta={sim.delta}, firings={sum(len(v) for v in trace.fired.values())}"
    )
    return trace


# === 场景文件 ===

def _on_off(token: str, line_no: int, name: str) -> bool:
    if token in ("on", "true", "1"):
        return True
    if token in ("off", "false", "0"):
        return False
    raise ScenarioParseError(line_no, f"expected on/off, got {token!r}", name)


def parse_scenario(source: Iterable[str]) -> ActivationState:
    """解析场景文本；引用未声明神经元、格式错误等均带行号报错。"""
    state = ActivationState()
    refs: List[Tuple[int, str, int, int]] = []   # (行号, 台账名, 神经元, 区间)
    for line_no, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key, args = tokens[0], tokens[1:]
        try:
            if key in ("delta", "threshold", "emit", "emit_h") and len(args) == 1:
                value = float(args[0])
                if key == "delta":
                    state.delta = value
                elif key == "threshold":
                    state.firing_threshold = value
                elif key == "emit":
                    state.emit = value
                else:
                    state.emit_h = value
            elif key == "horizon" and len(args) == 1:
                state.horizon = int(args[0])
            elif key == "feedback" and len(args) == 1:
                state.feedback = _on_off(args[0], line_no, key)
            elif key == "self" and len(args) == 1:
                state.include_self = _on_off(args[0], line_no, key)
            elif key == "pattern" and args:
                state.patterns.append(frozenset(int(a) for a in args))
            elif key == "external" and args:
                state.external |= {int(a) for a in args}
            elif key in ("E", "H") and len(args) == 3:
                neuron, t, value = int(args[0]), int(args[1]), float(args[2])
                ledger = state.excitatory if key == "E" else state.inhibitory
                ledger[(neuron, t)] = ledger.get((neuron, t), 0.0) + value
                refs.append((line_no, key, neuron, t))
            else:
                raise ScenarioParseError(line_no, f"unrecognised directive {line!r}", key)
        except ValueError as e:
            if isinstance(e, ScenarioParseError):
                raise
            raise ScenarioParseError(line_no, f"bad number in {line!r}", key) from None
    known: Set[int] = set(state.external)
    for p in state.patterns:
        known |= p
    for line_no, key, neuron, t in refs:
        if neuron not in known:
            raise ScenarioParseError(line_no, f"unknown neuron {neuron}", key)
        if not 1 <= t <= state.horizon:
            raise ScenarioParseError(line_no, f"interval {t} outside 1..{state.horizon}", key)
    return state.validate()


def load_scenario_file(path: Union[str, Path]) -> ActivationState:
    with Path(path).open("r", encoding="utf-8") as fh:
        return parse_scenario(fh)


def write_trace(trace: ActivationTrace, sink: IO[str]) -> None:
    sink.write("neuron\tt\tX\n")
    for i, t, v in trace.rows():
        sink.write(f"{i}\t{t}\t{v!r}\n")
