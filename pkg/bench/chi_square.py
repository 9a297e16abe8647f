# -*- coding: utf-8 -*-
"""
卡方基线：以组内各变量均值为假设期望的拟合优度。
每个变量 χ²_j = Σ_rows (x_ij − e_j)² / max(|e_j|, ε)，各变量求和后按行数取平均。
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from pattern.errors import DatasetError
from .dataset import DatasetTable

EPSILON = 1e-9


def chi_square_rows(rows: np.ndarray, epsilon: Optional[float] = EPSILON) -> float:
    """对一组行计算平均卡方；epsilon 为 None 时期望为 0 的列直接拒绝。"""
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[0] == 0:
        raise DatasetError(None, "chi-square needs a non-empty group")
    # 常数列直接取其值作为期望，避免均值舍入带来非零残差
    constant = np.all(data == data[0], axis=0)
    expected = np.where(constant, data[0], data.mean(axis=0))
    scale = np.abs(expected)
    if epsilon is None:
        if np.any(scale == 0.0):
            zero = [int(k) + 1 for k in np.flatnonzero(scale == 0.0)]
            raise DatasetError(None, f"expected value is zero for columns {zero}")
    else:
        scale = np.maximum(scale, epsilon)
    residual = data - expected
    per_variable = np.sum(residual * residual, axis=0) / scale
    return float(np.sum(per_variable) / data.shape[0])


def chi_square_group(table: DatasetTable, category: Optional[str] = None, epsilon: Optional[float] = EPSILON) -> float:
    """某一类别（或整个数据集）的卡方值。"""
    rows = table.group_rows(category)
    if rows.shape[0] == 0:
        raise DatasetError(None, f"category {category!r} has no rows")
    return chi_square_rows(rows, epsilon)
