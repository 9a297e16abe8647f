#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
模式存储与输入模式的文本格式
- 存储文件：制表符分隔，每行一条记录，便于 diff 与对照算例人工核查：
    S <clock> <next_pattern_id>        文件头（总是写出，空存储即只有这一行）
    P <pattern_id> <N_g>               模式实例头
    N <node_id> <R> <CI> <CG>          该实例下的一个节点记录
- 实数以 repr 输出，保证往返精度。
- 输入模式文件：每行 `t <timestamp> <node_id>:<signal> ...`，空行与 # 注释行跳过。
"""

from __future__ import annotations
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import IO, Iterable, List, Optional, Union

from .errors import InputParseError, StoreParseError
from .node import CountRecord, InputPattern
from .store import PatternInstance, PatternStore

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
SEP = "\t"


def _fmt(value: float) -> str:
    return repr(float(value))


def dump_store(store: PatternStore) -> List[str]:
    """将存储序列化为行列表（不含换行符）。"""
    lines = [SEP.join(["S", str(store.clock), str(store.next_pattern_id)])]
    for inst in store.ordered():
        lines.append(SEP.join(["P", str(inst.pattern_id), str(inst.group_events)]))
        for nid in inst.sorted_members():
            rec = inst.records[nid]
            lines.append(SEP.join(["N", str(nid), _fmt(rec.reinforcement), _fmt(rec.individual_count), _fmt(rec.group_count)]))
    return lines


def save_store(store: PatternStore, sink: IO[str]) -> None:
    """写入文本流。"""
    for line in dump_store(store):
        sink.write(line + "\n")


def save_store_file(store: PatternStore, path: PathLike) -> None:
    """原子写入：先写同目录临时文件，再 os.replace 覆盖目标。"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".store_", suffix=".tmp", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            save_store(store, fh)
        os.replace(tmp, target)
    except Exception:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    logger.debug(f"[STORE] saved {len(store)} patterns to {target}")


def _parse_int(token: str, line_no: int, name: str, minimum: int = 0) -> int:
    try:
        value = int(token)
    except ValueError:
        raise StoreParseError(line_no, f"expected integer, got {token!r}", name) from None
    if value < minimum:
        raise StoreParseError(line_no, f"must be >= {minimum}, got {value}", name)
    return value


def _parse_count(token: str, line_no: int, name: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise StoreParseError(line_no, f"expected real number, got {token!r}", name) from None
    if not math.isfinite(value):
        raise StoreParseError(line_no, "value is not finite", name)
    if value < 0.0:
        raise StoreParseError(line_no, f"negative value {value}", name)
    return value


def load_store(source: Iterable[str]) -> PatternStore:
    """从文本行（文件对象或字符串列表）解析存储；格式错误时抛出 StoreParseError。"""
    store: Optional[PatternStore] = None
    current: Optional[PatternInstance] = None
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split(SEP)
        kind = parts[0]
        if store is None:
            if kind != "S":
                raise StoreParseError(line_no, "missing 'S' header line", "kind")
            if len(parts) != 3:
                raise StoreParseError(line_no, f"header needs 3 fields, got {len(parts)}")
            store = PatternStore(
                clock=_parse_int(parts[1], line_no, "clock"),
                next_pattern_id=_parse_int(parts[2], line_no, "next_pattern_id", minimum=1),
            )
            continue
        if kind == "P":
            if len(parts) != 3:
                raise StoreParseError(line_no, f"pattern line needs 3 fields, got {len(parts)}")
            if current is not None and not current.members:
                raise StoreParseError(line_no - 1, f"pattern {current.pattern_id} has no nodes")
            pid = _parse_int(parts[1], line_no, "pattern_id")
            if pid in store.patterns:
                raise StoreParseError(line_no, f"duplicate pattern id {pid}", "pattern_id")
            if pid >= store.next_pattern_id:
                raise StoreParseError(line_no, f"pattern id {pid} not below next id {store.next_pattern_id}", "pattern_id")
            current = PatternInstance(pattern_id=pid, group_events=_parse_int(parts[2], line_no, "group_events"))
            store.patterns[pid] = current
        elif kind == "N":
            if current is None:
                raise StoreParseError(line_no, "node line before any pattern line", "kind")
            if len(parts) != 5:
                raise StoreParseError(line_no, f"node line needs 5 fields, got {len(parts)}")
            nid = _parse_int(parts[1], line_no, "node_id")
            if nid in current.members:
                raise StoreParseError(line_no, f"duplicate node {nid} in pattern {current.pattern_id}", "node_id")
            current.members.add(nid)
            current.records[nid] = CountRecord(
                reinforcement=_parse_count(parts[2], line_no, "R"),
                individual_count=_parse_count(parts[3], line_no, "CI"),
                group_count=_parse_count(parts[4], line_no, "CG"),
            )
        else:
            raise StoreParseError(line_no, f"unknown record kind {kind!r}", "kind")
    if store is None:
        raise StoreParseError(1, "empty source, missing 'S' header line", "kind")
    if current is not None and not current.members:
        raise StoreParseError(line_no, f"pattern {current.pattern_id} has no nodes")
    return store


def load_store_file(path: PathLike) -> PatternStore:
    """读取存储文件；文件不存在时返回空存储。"""
    p = Path(path)
    if not p.exists():
        logger.info(f"[STORE] {p} 不存在，使用空存储")
        return PatternStore()
    with p.open("r", encoding="utf-8") as fh:
        return load_store(fh)


# === 输入模式 ===

def format_input(ip: InputPattern) -> str:
    items = " ".join(f"{nid}:{_fmt(ip.signals[nid])}" for nid in sorted(ip.signals))
    return f"t {ip.timestamp} {items}".rstrip()


def parse_inputs(source: Iterable[str]) -> List[InputPattern]:
    """解析输入模式行；任何一行出错即抛出 InputParseError（带行号）。"""
    result: List[InputPattern] = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] != "t" or len(tokens) < 2:
            raise InputParseError(line_no, "expected 't <timestamp> <node>:<signal> ...'")
        try:
            ts = int(tokens[1])
        except ValueError:
            raise InputParseError(line_no, f"bad timestamp {tokens[1]!r}", "timestamp") from None
        signals = {}
        for tok in tokens[2:]:
            node_s, sep, sig_s = tok.partition(":")
            if not sep:
                raise InputParseError(line_no, f"bad item {tok!r}, expected node:signal", "signal")
            try:
                nid = int(node_s)
                sig = float(sig_s)
            except ValueError:
                raise InputParseError(line_no, f"bad item {tok!r}", "signal") from None
            if nid < 0 or not math.isfinite(sig):
                raise InputParseError(line_no, f"bad item {tok!r}", "signal")
            if nid in signals:
                raise InputParseError(line_no, f"node {nid} listed twice", "node_id")
            signals[nid] = sig
        result.append(InputPattern(signals, ts))
    return result


def load_inputs_file(path: PathLike) -> List[InputPattern]:
    with Path(path).open("r", encoding="utf-8") as fh:
        return parse_inputs(fh)
