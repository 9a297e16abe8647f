# -*- coding: utf-8 -*-
"""
命令行子命令：present / cohesion / split / simulate / bench。
退出码：0 成功；1 用法、解析或领域错误；2 基准方向性结论不成立。
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import IO, Optional, Sequence

from bench.dataset import STATLOG_CATEGORIES, STATLOG_SCHEMA, DatasetSchema, fetch_statlog, load_dataset_file
from bench.report import build_report, directional_claim, render_report_text, write_report_delimited
from engine.activation import load_scenario_file, run, write_trace
from engine.cohesion import FactorMode, instance_cohesion, node_verdicts
from engine.reinforcement import decay, present
from engine.split_search import (
    SplitConfig,
    brute_force_best_split,
    instance_counts,
    rank_single_removals,
    suggest_split,
)
from pattern.errors import CohesionError, PatternError, SplitError
from pattern.history import HistoryRecorder
from pattern.persistence import load_inputs_file, load_store_file, save_store_file
from .config import NORMALIZE_MODES, CommandConfig, env_defaults

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CLAIM_FAILED = 2


class UsageError(Exception):
    """参数错误；argparse 默认以 2 退出，这里统一为 1。"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, help="node cohesion tolerance (default 0.5)")
    p.add_argument("--omega-i", dest="omega_i", type=float, help="individual count increment (default 1)")
    p.add_argument("--omega-g", dest="omega_g", type=float, help="group count increment (default 1)")
    p.add_argument("--inhibit-delta", dest="inhibit_delta", type=float, help="inhibition weight (default 0.5)")
    p.add_argument("--decay", type=float, help="multiplicative decay per presentation, 1 disables (default 1)")
    p.add_argument("--overlap-threshold", dest="overlap_threshold", type=float,
                   help="create a new instance when the best overlap fraction is below this (default 1)")
    p.add_argument("--spread", choices=("worked", "textbook"), help="dispersion convention (default worked)")
    p.add_argument("--log-level", dest="log_level", help="logging level (default INFO)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pattern-cohesion", description="Pattern cohesion clustering toolkit")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("present", help="present input patterns to a store")
    p.add_argument("store")
    p.add_argument("inputs")
    p.add_argument("--signal-scaled", dest="signal_scaled", action="store_true",
                   help="scale reinforcement by the input signal")
    _add_common(p)

    p = sub.add_parser("cohesion", help="report cohesion of every pattern in a store")
    p.add_argument("store")
    p.add_argument("--factor", choices=[m.value for m in FactorMode], default=FactorMode.COUNT_RATIO.value,
                   help="count factor convention (default count)")
    _add_common(p)

    p = sub.add_parser("split", help="rank single-node removals of one pattern")
    p.add_argument("store")
    p.add_argument("pattern_id", type=int)
    _add_common(p)

    p = sub.add_parser("simulate", help="run the activation dynamics of a scenario")
    p.add_argument("scenario")
    p.add_argument("--out", help="trace file (default stdout)")
    _add_common(p)

    p = sub.add_parser("bench", help="whole-dataset versus per-category benchmark")
    p.add_argument("dataset")
    p.add_argument("--statlog", action="store_true", help="use the Statlog segment layout, download when missing")
    p.add_argument("--label-col", dest="label_col", type=int, help="label column, negative counts from the end")
    p.add_argument("--delimiter", help="cell delimiter (default whitespace)")
    p.add_argument("--header", action="store_true", help="first data line holds column names")
    p.add_argument("--normalize", choices=NORMALIZE_MODES, help="normalisation mode (default minmax)")
    p.add_argument("--out", help="delimited report file (default <dataset>.report.tsv)")
    _add_common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> CommandConfig:
    """参数优先于环境变量，环境变量优先于默认值。"""
    cfg = CommandConfig(subcommand=args.subcommand)
    env = env_defaults()
    for name, value in env.items():
        setattr(cfg, name, value)
    env_inhibit = "inhibit_delta" in env
    for name in ("delta", "omega_i", "omega_g", "inhibit_delta", "decay", "overlap_threshold",
                 "spread", "log_level", "normalize"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    cfg.inhibit_delta_explicit = env_inhibit or getattr(args, "inhibit_delta", None) is not None
    cfg.signal_scaled = bool(getattr(args, "signal_scaled", False))
    return cfg.validate()


def _fmt(v: float) -> str:
    return f"{v:.4f}"


# === 子命令 ===

def cmd_present(args: argparse.Namespace, cfg: CommandConfig, out: IO[str]) -> int:
    upd = cfg.update_config()
    # 先完整解析，任何一行出错都不改动存储文件
    store = load_store_file(args.store)
    inputs = load_inputs_file(args.inputs)
    history = HistoryRecorder()
    for ip in inputs:
        decay(store, upd)
        present(store, ip, upd, history)
    out.write(f"# {cfg.header()}\n")
    for rec in history.records:
        out.write(f"t={rec.timestamp} nodes={list(rec.nodes)} best_overlap={_fmt(rec.best_overlap)}\n")
        for d in rec.deltas:
            tag = " (new)" if d.created else ""
            blue = f" blue={d.blue}" if d.blue else ""
            out.write(f"  pattern {d.pattern_id}{tag}: shared={d.shared}{blue}\n")
    save_store_file(store, args.store)
    out.write(f"store {args.store}: {len(store)} patterns, clock={store.clock}\n")
    logger.info(json.dumps({
        "event": "present_batch",
        "inputs": len(inputs),
        "created": sum(1 for r in history.records if r.created_id is not None),
        "patterns": len(store),
        "clock": store.clock,
    }, ensure_ascii=False))
    return EXIT_OK


def _existing_store(path: str):
    if not Path(path).exists():
        raise PatternError(f"store file not found: {path}")
    return load_store_file(path)


def cmd_cohesion(args: argparse.Namespace, cfg: CommandConfig, out: IO[str]) -> int:
    store = _existing_store(args.store)
    thr = cfg.threshold()
    spread = cfg.spread_mode()
    factor_mode = FactorMode(getattr(args, "factor", FactorMode.COUNT_RATIO.value))
    out.write(f"# {cfg.header()} factor={factor_mode.value}\n")
    if not len(store):
        out.write("(empty store)\n")
        return EXIT_OK
    for inst in store.ordered():
        out.write(f"pattern {inst.pattern_id}: nodes={inst.sorted_members()} N_g={inst.group_events}\n")
        try:
            rep = instance_cohesion(inst, spread=spread, factor_mode=factor_mode)
        except CohesionError as e:
            out.write(f"  cohesion undefined: {e}\n")
            continue
        out.write(
            f"  Var={_fmt(rep.var_coefficient)} CF={_fmt(rep.count_factor)} Coh={_fmt(rep.cohesion)} "
            f"lav={_fmt(rep.local_mean)} gav={_fmt(rep.global_mean)}\n"
        )
        for nid, gap, ok in node_verdicts(inst, thr):
            out.write(f"  node {nid}: gap={_fmt(gap)} {'cohesive' if ok else 'not cohesive'}\n")
    return EXIT_OK


def cmd_split(args: argparse.Namespace, cfg: CommandConfig, out: IO[str]) -> int:
    store = _existing_store(args.store)
    inst = store.get(args.pattern_id)
    if inst is None:
        known = sorted(store.patterns)
        raise PatternError(f"unknown pattern id {args.pattern_id}; known ids: {known}")
    if len(inst.members) < 2:
        raise SplitError(f"pattern {inst.pattern_id} has a single node, nothing to split")
    spread = cfg.spread_mode()
    counts = instance_counts(inst)
    out.write(f"# {cfg.header()}\n")
    out.write(f"pattern {inst.pattern_id}: nodes={inst.sorted_members()} counts={[counts[n] for n in sorted(counts)]}\n")
    out.write("rank\tremoved\tremainder\tcomposite\n")
    for rank, (nid, ev) in enumerate(rank_single_removals(counts, spread), start=1):
        out.write(f"{rank}\t{nid}\t{_fmt(ev.remainder_cohesion)}\t{_fmt(ev.composite)}\n")
    split_cfg = SplitConfig(spread=spread)
    if len(counts) <= split_cfg.max_brute_force_members:
        best, ev = brute_force_best_split(counts, split_cfg)
        out.write(f"best two-part split: {[list(k) for k in best.key()]} composite={_fmt(ev.composite)}\n")
    if inst.group_events > 0:
        suggestion = suggest_split(inst, cfg.threshold(), spread)
        if suggestion is None:
            out.write("suggestion: keep the pattern whole\n")
        else:
            out.write(f"suggestion: split into {[list(k) for k in suggestion.key()]}\n")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, cfg: CommandConfig, out: IO[str]) -> int:
    state = load_scenario_file(args.scenario)
    if cfg.inhibit_delta_explicit:
        state.delta = cfg.inhibit_delta
    trace = run(state)
    if args.out:
        target = Path(args.out)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="\n") as fh:
            write_trace(trace, fh)
        out.write(f"# delta={state.delta} horizon={state.horizon} patterns={len(state.patterns)}\n")
        out.write(f"trace written to {target}\n")
    else:
        write_trace(trace, out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, cfg: CommandConfig, out: IO[str], err: IO[str]) -> int:
    path = Path(args.dataset)
    if args.statlog:
        schema = STATLOG_SCHEMA
        names = STATLOG_CATEGORIES
        if not path.exists():
            fetch_statlog(path)
    else:
        schema = DatasetSchema()
        names = None
    schema = DatasetSchema(
        delimiter=args.delimiter if args.delimiter is not None else schema.delimiter,
        label_col=args.label_col if args.label_col is not None else schema.label_col,
        header=args.header or schema.header,
        categories=schema.categories,
        variables=schema.variables,
    )
    table = load_dataset_file(path, schema)
    report = build_report(table, normalize_mode=cfg.normalize, spread=cfg.spread_mode(), category_names=names)
    out.write(render_report_text(report, header=[cfg.header(), f"dataset: {path}"]))
    target = Path(args.out) if args.out else path.with_name(path.name + ".report.tsv")
    with target.open("w", encoding="utf-8", newline="\n") as fh:
        write_report_delimited(report, fh)
    out.write(f"report written to {target}\n")
    ok, failing = directional_claim(report)
    if not ok:
        err.write(f"directional claim failed: categories not above the whole dataset: {failing}\n")
        return EXIT_CLAIM_FAILED
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out: Optional[IO[str]] = None, err: Optional[IO[str]] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        if not args.subcommand:
            raise UsageError(parser.format_usage().strip())
        cfg = resolve_config(args)
        logging.getLogger().setLevel(cfg.log_level.upper())
        if args.subcommand == "present":
            return cmd_present(args, cfg, out)
        if args.subcommand == "cohesion":
            return cmd_cohesion(args, cfg, out)
        if args.subcommand == "split":
            return cmd_split(args, cfg, out)
        if args.subcommand == "simulate":
            return cmd_simulate(args, cfg, out)
        return cmd_bench(args, cfg, out, err)
    except UsageError as e:
        err.write(f"{e}\n")
        return EXIT_ERROR
    except (PatternError, OSError, RuntimeError) as e:
        err.write(f"error: {e}\n")
        return EXIT_ERROR
