# -*- coding: utf-8 -*-
"""
命令行配置：数据类默认值 < 环境变量（可写在 .env 中） < 命令行参数。
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Dict, Optional

from engine.cohesion import CohesionThreshold, SpreadMode
from engine.reinforcement import UpdateConfig
from pattern.errors import PatternError

SUBCOMMANDS = ("present", "cohesion", "split", "simulate", "bench")
NORMALIZE_MODES = ("minmax", "none")

# 环境变量 -> 配置字段
ENV_KEYS: Dict[str, str] = {
    "PCOH_DELTA": "delta",
    "PCOH_OMEGA_I": "omega_i",
    "PCOH_OMEGA_G": "omega_g",
    "PCOH_INHIBIT_DELTA": "inhibit_delta",
    "PCOH_DECAY": "decay",
    "PCOH_OVERLAP_THRESHOLD": "overlap_threshold",
    "PCOH_NORMALIZE": "normalize",
    "PCOH_LOG_LEVEL": "log_level",
}


@dataclass
class CommandConfig:
    subcommand: str = "cohesion"
    delta: float = 0.5                 # 节点内聚允许差 Δ
    omega_i: float = 1.0
    omega_g: float = 1.0
    inhibit_delta: float = 0.5         # 抑制权重 δ
    decay: float = 1.0                 # 1.0 即关闭衰减
    overlap_threshold: float = 1.0
    signal_scaled: bool = False
    normalize: str = "minmax"
    spread: str = SpreadMode.WORKED.value
    log_level: str = "INFO"
    inhibit_delta_explicit: bool = False

    def validate(self) -> "CommandConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise PatternError(f"unknown subcommand {self.subcommand!r}")
        for name in ("delta", "omega_i", "omega_g"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise PatternError(f"--{name.replace('_', '-')} must be > 0, got {v}")
        if not (math.isfinite(self.inhibit_delta) and self.inhibit_delta >= 0):
            raise PatternError(f"--inhibit-delta must be >= 0, got {self.inhibit_delta}")
        if not (0.0 < self.decay <= 1.0):
            raise PatternError(f"--decay must be in (0, 1], got {self.decay}")
        if not (0.0 <= self.overlap_threshold <= 1.0):
            raise PatternError(f"--overlap-threshold must be in [0, 1], got {self.overlap_threshold}")
        if self.normalize not in NORMALIZE_MODES:
            raise PatternError(f"--normalize must be one of {NORMALIZE_MODES}, got {self.normalize!r}")
        if self.spread not in {m.value for m in SpreadMode}:
            raise PatternError(f"--spread must be worked or textbook, got {self.spread!r}")
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            raise PatternError(f"unknown log level {self.log_level!r}")
        return self

    def update_config(self) -> UpdateConfig:
        return UpdateConfig(
            omega_i=self.omega_i,
            omega_g=self.omega_g,
            decay_factor=self.decay,
            new_instance_overlap_threshold=self.overlap_threshold,
            signal_scaled=self.signal_scaled,
        ).validate()

    def threshold(self) -> CohesionThreshold:
        return CohesionThreshold(self.delta)

    def spread_mode(self) -> SpreadMode:
        return SpreadMode(self.spread)

    def header(self) -> str:
        """报告头：列出全部生效参数，便于审计。"""
        decay = f"{self.decay}" + (" (off)" if self.decay >= 1.0 else "")
        return (
            f"delta={self.delta} omega_i={self.omega_i} omega_g={self.omega_g} "
            f"inhibit_delta={self.inhibit_delta} decay={decay} "
            f"overlap_threshold={self.overlap_threshold} normalize={self.normalize} spread={self.spread}"
        )


def env_defaults(environ: Optional[Dict[str, str]] = None) -> Dict[str, object]:
    """读取 PCOH_* 环境变量，数值项转为 float；无法解析时报错。"""
    env = os.environ if environ is None else environ
    out: Dict[str, object] = {}
    for key, name in ENV_KEYS.items():
        raw = env.get(key)
        if raw is None or raw == "":
            continue
        if name in ("normalize", "log_level"):
            out[name] = raw.strip()
            continue
        try:
            out[name] = float(raw)
        except ValueError:
            raise PatternError(f"environment variable {key} is not a number: {raw!r}") from None
    return out
