# -*- coding: utf-8 -*-
"""
基准报告：整体数据集作为一个模式，与各类别分别度量的内聚/卡方对比。
- 每行数据映射为一个节点值（各变量均值）；
- 组内统计沿用拆分重算规则：lav = 节点值均值，gav = 最大节点值；
- 类别结果以占整体结果的百分比给出（带符号），符号相反时标记 sign_crossing。
"""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from typing import IO, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from engine.cohesion import CohesionReport, SpreadMode, pattern_cohesion, signed_pattern_cohesion
from pattern.errors import CohesionError, DatasetError
from .chi_square import EPSILON, chi_square_group
from .dataset import DatasetTable, normalize, row_to_node_value

logger = logging.getLogger(__name__)

MODE_RAW = "raw"
MODE_MINMAX = "minmax"
WHOLE = "whole"

DATASET_RULE = "node value = mean of row variables; lav = mean node value; gav = max node value"
CHI_SQUARE_RULE = f"expected = group mean per variable, guard eps={EPSILON}; sum over variables / rows"


def node_values(table: DatasetTable, category: Optional[str] = None) -> List[float]:
    rows = table.group_rows(category)
    if rows.shape[0] == 0:
        raise DatasetError(None, f"category {category!r} has no rows")
    return [row_to_node_value(r) for r in rows]


def group_cohesion_report(
    table: DatasetTable,
    category: Optional[str] = None,
    spread: SpreadMode = SpreadMode.WORKED,
) -> CohesionReport:
    values = node_values(table, category)
    # 原始数据的节点值可为负，此时按带符号口径计算
    arr = np.sort(np.asarray(values, dtype=float))
    lav, gav = float(arr.mean()), float(arr.max())
    if lav == 0.0 and gav == 0.0:
        return CohesionReport(0.0, 0.0, 0.0, 0.0, 0.0)
    try:
        return signed_pattern_cohesion(list(arr), lav, gav, spread=spread)
    except CohesionError as e:
        logger.warning(f"[BENCH] group {category or WHOLE} cohesion undefined: {e}")
        return CohesionReport(math.nan, math.nan, math.nan, lav, gav)


def group_cohesion(table: DatasetTable, category: Optional[str] = None, spread: SpreadMode = SpreadMode.WORKED) -> float:
    """某一类别（None 为整个数据集）的内聚值。"""
    return group_cohesion_report(table, category, spread).cohesion


# --- 关键词分组示例 ---

def keyword_presence(groups: Mapping[str, Iterable[str]]) -> Tuple[List[str], np.ndarray]:
    """由各分组的关键词列表构造 0/1 出现矩阵（行 = 分组，列 = 关键词，关键词按字典序）。"""
    names = list(groups.keys())
    keywords = sorted({k for kws in groups.values() for k in kws})
    matrix = np.zeros((len(names), len(keywords)), dtype=float)
    index = {k: c for c, k in enumerate(keywords)}
    for r, name in enumerate(names):
        for k in set(groups[name]):
            matrix[r, index[k]] = 1.0
    return keywords, matrix


def keyword_cohesion(presence: np.ndarray, spread: SpreadMode = SpreadMode.WORKED) -> CohesionReport:
    """关键词计数为局部计数，分组总数为全局计数。"""
    data = np.asarray(presence, dtype=float)
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] == 0:
        raise DatasetError(None, "presence matrix must have at least one group and one keyword")
    counts = data.sum(axis=0)
    return pattern_cohesion(list(counts), float(np.mean(counts)), float(data.shape[0]), spread=spread)


# --- 报告 ---

@dataclass
class GroupResult:
    group: str
    mode: str
    chi_square: float
    cohesion: float
    chi_square_pct: Optional[float] = None
    cohesion_pct: Optional[float] = None
    sign_crossing: bool = False


@dataclass
class BenchReport:
    modes: List[str] = field(default_factory=list)
    whole: Dict[str, GroupResult] = field(default_factory=dict)
    per_category: Dict[str, List[GroupResult]] = field(default_factory=dict)
    metadata: Dict[str, str] = field(default_factory=dict)

    def rows(self) -> List[GroupResult]:
        out: List[GroupResult] = []
        for mode in self.modes:
            out.append(self.whole[mode])
            out.extend(self.per_category[mode])
        return out


def _pct(value: float, whole: float) -> Optional[float]:
    if whole == 0.0 or not (math.isfinite(value) and math.isfinite(whole)):
        return None
    return value / whole * 100.0


def _crosses(value: float, whole: float) -> bool:
    return (value < 0.0 < whole) or (whole < 0.0 < value)


def build_report(
    table: DatasetTable,
    normalize_mode: str = MODE_MINMAX,
    spread: SpreadMode = SpreadMode.WORKED,
    category_names: Optional[Mapping[str, str]] = None,
) -> BenchReport:
    """整体与逐类别的卡方、内聚，原始与归一化两种口径。"""
    if not table.categories:
        raise DatasetError(None, "table declares no categories")
    if normalize_mode not in (MODE_MINMAX, "none"):
        raise DatasetError(None, f"unknown normalisation mode {normalize_mode!r}")
    tables = {MODE_RAW: table}
    if normalize_mode == MODE_MINMAX:
        tables[MODE_MINMAX] = normalize(table)
    names = dict(category_names or {})
    report = BenchReport(
        modes=list(tables.keys()),
        metadata={
            "node_mapping": DATASET_RULE,
            "chi_square": CHI_SQUARE_RULE,
            "normalisation": normalize_mode,
            "spread": spread.value,
            "rows": str(table.shape[0]),
            "variables": str(table.shape[1]),
        },
    )
    for mode, tbl in tables.items():
        whole = GroupResult(WHOLE, mode, chi_square_group(tbl), group_cohesion(tbl, None, spread))
        report.whole[mode] = whole
        results: List[GroupResult] = []
        for cat in tbl.categories:
            chi = chi_square_group(tbl, cat)
            coh = group_cohesion(tbl, cat, spread)
            results.append(
                GroupResult(
                    group=names.get(cat, cat),
                    mode=mode,
                    chi_square=chi,
                    cohesion=coh,
                    chi_square_pct=_pct(chi, whole.chi_square),
                    cohesion_pct=_pct(coh, whole.cohesion),
                    sign_crossing=_crosses(coh, whole.cohesion),
                )
            )
        report.per_category[mode] = results
        logger.info(json.dumps({
            "event": "bench_mode",
            "mode": mode,
            "whole_chi_square": whole.chi_square,
            "whole_cohesion": whole.cohesion,
            "categories": len(results),
        }, ensure_ascii=False))
    return report


def directional_claim(report: BenchReport) -> Tuple[bool, List[str]]:
    """每个类别的内聚严格高于整体（有归一化口径时以其为准）。返回 (是否成立, 不满足的类别)。"""
    mode = MODE_MINMAX if MODE_MINMAX in report.modes else MODE_RAW
    whole = report.whole[mode].cohesion
    failing = [r.group for r in report.per_category[mode] if not r.cohesion > whole]
    return (not failing, failing)


def _fmt_pct(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.2f}%"


def _fmt_value(value: float) -> str:
    return f"{value:.6g}" if math.isfinite(value) else "undefined"


def render_report_text(report: BenchReport, header: Sequence[str] = ()) -> str:
    """表格化文本：整体行给出绝对值，类别行给出占整体的百分比。"""
    cols: List[str] = []
    for mode in report.modes:
        suffix = "" if mode == MODE_RAW else " Normalised"
        cols.append(f"Chi-Square{suffix}")
    for mode in report.modes:
        suffix = "" if mode == MODE_RAW else " Normalised"
        cols.append(f"Cohesion{suffix}")
    groups = [WHOLE] + [r.group for r in report.per_category[report.modes[0]]]
    cells: List[List[str]] = []
    for g_idx, group in enumerate(groups):
        line = ["Whole Dataset" if group == WHOLE else group]
        for metric in ("chi", "coh"):
            for mode in report.modes:
                if group == WHOLE:
                    res = report.whole[mode]
                    line.append(_fmt_value(res.chi_square if metric == "chi" else res.cohesion))
                else:
                    res = report.per_category[mode][g_idx - 1]
                    if metric == "coh" and not math.isfinite(res.cohesion):
                        line.append("undefined")
                        continue
                    text = _fmt_pct(res.chi_square_pct if metric == "chi" else res.cohesion_pct)
                    if metric == "coh" and res.sign_crossing:
                        text += " (sign)"
                    line.append(text)
        cells.append(line)
    head = ["Group"] + cols
    widths = [max(len(head[k]), *(len(r[k]) for r in cells)) for k in range(len(head))]
    out = [f"# {h}" for h in header]
    out += [f"# {k}: {v}" for k, v in report.metadata.items()]
    for mode in report.modes:
        if report.whole[mode].cohesion < 0:
            out.append(f"# whole-dataset cohesion is negative in mode {mode}")
    out.append("  ".join(h.ljust(w) for h, w in zip(head, widths)))
    for r in cells:
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(out) + "\n"


def write_report_delimited(report: BenchReport, sink: IO[str], delimiter: str = "\t") -> None:
    writer = csv.writer(sink, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["group", "mode", "chi_square", "cohesion", "chi_square_pct_of_whole", "cohesion_pct_of_whole", "sign_crossing"])
    for r in report.rows():
        writer.writerow([
            r.group,
            r.mode,
            repr(r.chi_square),
            repr(r.cohesion),
            "" if r.chi_square_pct is None else repr(r.chi_square_pct),
            "" if r.cohesion_pct is None else repr(r.cohesion_pct),
            int(r.sign_crossing),
        ])
