# -*- coding: utf-8 -*-
"""
数据集读取与预处理：分隔符可配置的文本表格，内置 Statlog segment 布局。
- Statlog segment：空白分隔，19 个图像属性，最后一列为类别 1..7；
- 下载：使用 requests 拉取原始数据文件，地址可由环境变量 PCOH_STATLOG_URL 覆盖。
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import requests

from pattern.errors import DatasetError

logger = logging.getLogger(__name__)

STATLOG_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/statlog/segment/segment.dat"

STATLOG_VARIABLES: Tuple[str, ...] = (
    "region-centroid-col", "region-centroid-row", "region-pixel-count",
    "short-line-density-5", "short-line-density-2", "vedge-mean", "vedge-sd",
    "hedge-mean", "hedge-sd", "intensity-mean", "rawred-mean", "rawblue-mean",
    "rawgreen-mean", "exred-mean", "exblue-mean", "exgreen-mean", "value-mean",
    "saturation-mean", "hue-mean",
)

# 类别编号 -> 名称
STATLOG_CATEGORIES: Dict[str, str] = {
    "1": "brickface", "2": "sky", "3": "foliage", "4": "cement",
    "5": "window", "6": "path", "7": "grass",
}


@dataclass(frozen=True)
class DatasetSchema:
    delimiter: Optional[str] = None              # None 表示任意空白
    label_col: int = -1                          # 标签列位置，负数自尾部计
    header: bool = False                         # 首行是否为列名
    categories: Optional[Tuple[str, ...]] = None # 声明的类别集合；None 时从数据推断
    variables: Optional[Tuple[str, ...]] = None  # 变量名；None 时自动命名


STATLOG_SCHEMA = DatasetSchema(
    delimiter=None,
    label_col=-1,
    header=False,
    categories=tuple(STATLOG_CATEGORIES.keys()),
    variables=STATLOG_VARIABLES,
)


@dataclass
class DatasetTable:
    variables: List[str]
    rows: np.ndarray                 # 形状 (行数, 变量数)
    labels: List[str]
    categories: List[str] = field(default_factory=list)

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.rows.shape[0]), int(self.rows.shape[1]))

    def group_rows(self, category: Optional[str] = None) -> np.ndarray:
        """取某一类别的行；category 为 None 时返回整个数据集。"""
        if category is None:
            return self.rows
        mask = np.array([lbl == category for lbl in self.labels], dtype=bool)
        return self.rows[mask]


def _split(line: str, delimiter: Optional[str]) -> List[str]:
    if delimiter is None:
        return line.split()
    return [c.strip() for c in line.split(delimiter)]


def load_dataset(source: Iterable[str], schema: DatasetSchema = DatasetSchema()) -> DatasetTable:
    """按 schema 解析表格；参差行、未知标签、非数值单元格均报出行号。"""
    names: Optional[List[str]] = list(schema.variables) if schema.variables else None
    arity: Optional[int] = None
    values: List[List[float]] = []
    labels: List[str] = []
    allowed = set(schema.categories) if schema.categories else None
    header_pending = schema.header
    for row_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = _split(line, schema.delimiter)
        if header_pending:
            header_pending = False
            label_idx = schema.label_col % len(cells)
            if names is None:
                names = [c for k, c in enumerate(cells) if k != label_idx]
            arity = len(cells)
            continue
        if arity is None:
            arity = len(cells)
        if len(cells) != arity:
            raise DatasetError(row_no, f"expected {arity} cells, got {len(cells)}")
        if "" in cells:
            raise DatasetError(row_no, "missing cell", f"column {cells.index('') + 1}")
        if arity < 2:
            raise DatasetError(row_no, "a row needs at least one variable and a label")
        label_idx = schema.label_col % arity
        label = cells[label_idx]
        if allowed is not None and label not in allowed:
            raise DatasetError(row_no, f"unknown label {label!r}", "label")
        vec: List[float] = []
        for k, cell in enumerate(cells):
            if k == label_idx:
                continue
            try:
                vec.append(float(cell))
            except ValueError:
                raise DatasetError(row_no, f"non-numeric cell {cell!r}", f"column {k + 1}") from None
        values.append(vec)
        labels.append(label)
    if not values:
        raise DatasetError(None, "dataset has no data rows")
    width = len(values[0])
    if names is None or len(names) != width:
        names = [f"v{k + 1}" for k in range(width)]
    if schema.categories:
        cats = list(schema.categories)
    else:
        cats = sorted(set(labels))
    logger.info(f"[BENCH] 读取数据集：rows={len(values)} variables={width} categories={len(cats)}")
    return DatasetTable(variables=names, rows=np.asarray(values, dtype=float), labels=labels, categories=cats)


def load_dataset_file(path: Union[str, Path], schema: DatasetSchema = DatasetSchema()) -> DatasetTable:
    with Path(path).open("r", encoding="utf-8") as fh:
        return load_dataset(fh, schema)


def normalize(table: DatasetTable) -> DatasetTable:
    """逐变量 min-max 缩放到 [0,1]；常数列映射为 0。"""
    rows = table.rows
    lo = rows.min(axis=0)
    span = rows.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (rows - lo) / safe, 0.0)
    return DatasetTable(variables=list(table.variables), rows=scaled, labels=list(table.labels), categories=list(table.categories))


def row_to_node_value(row: Sequence[float]) -> float:
    """一行数据映射为单个节点值：各变量的算术平均。"""
    arr = np.asarray(row, dtype=float)
    if arr.size == 0:
        raise DatasetError(None, "row has no variables")
    return float(np.mean(arr))


def fetch_statlog(dest: Union[str, Path], url: Optional[str] = None, timeout: int = 30) -> Path:
    """下载 Statlog segment 数据文件到 dest，返回文件路径。"""
    url = url or os.environ.get("PCOH_STATLOG_URL") or STATLOG_URL
    target = Path(dest)
    logger.info(f"[BENCH] 下载 Statlog 数据集：{url}")
    resp = requests.get(url, timeout=timeout)
    if resp.status_code != 200:
        raise RuntimeError(f"dataset download failed: status={resp.status_code}, text={resp.text[:200]}")
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8") as fh:
        fh.write(resp.text)
    return target
