#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
领域异常定义：所有业务错误均派生自 PatternError（同时是 ValueError），
解析类错误携带 1 基行号与字段名，便于命令行直接定位。
"""
from __future__ import annotations
from typing import Optional


class PatternError(ValueError):
    """模式内聚库的领域错误根类型。"""


class EmptyPatternError(PatternError):
    """空节点集合或空输入模式。"""


class CohesionError(PatternError):
    """内聚计算的前置条件不满足（均值非正、N_g 为 0 等）。"""


class SplitError(PatternError):
    """非法划分、单节点模式或规模超出穷举上限。"""


class ActivationError(PatternError):
    """激活状态非法：神经元不属于任何模式、模式重叠等。"""


class _LocatedError(PatternError):
    """带位置信息的解析错误基类。"""
    kind = "line"

    def __init__(self, line: Optional[int], message: str, field: Optional[str] = None) -> None:
        self.line = line
        self.field = field
        if line is None:
            # 组级错误不对应具体行
            super().__init__(message)
            return
        where = f"{self.kind} {line}"
        if field:
            where += f", field '{field}'"
        super().__init__(f"{where}: {message}")


class StoreParseError(_LocatedError):
    """存储文件格式错误。"""


class InputParseError(_LocatedError):
    """输入模式文件格式错误。"""


class ScenarioParseError(_LocatedError):
    """激活场景文件格式错误。"""


class DatasetError(_LocatedError):
    """数据集错误：行级错误（参差行、未知标签、非数值单元格）带行号，组级错误不带位置。"""
    kind = "row"
