"""Command line entry point: ``tpmine mine | gen | bench``."""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from .core import Mode
from .datagen import generate, manifest_json, parse_gen_spec, write_csv
from .io import ConfigError, RunConfig, load_symbolic_database, read_flat_config, running_example_path
from .miner import MiningReport, accuracy, mine, mine_approximate
from .transform import IngestionError, build_sequence_db

_OVERRIDES = ["input", "window", "overlap", "t_max", "epsilon", "d_o", "sigma_min", "sigma_max", "delta",
              "mode", "pruning", "max_pattern_len", "method", "output", "seed", "alphabet"]


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


def _run_config(args) -> RunConfig:
    items = read_flat_config(args.config) if args.config else {}
    cfg = RunConfig.from_items(items)
    flags = {k: getattr(args, k) for k in _OVERRIDES if getattr(args, k, None) is not None}
    if getattr(args, "example", False):
        flags["input"] = running_example_path()
        for c in "STWI":
            cfg.alphabets.setdefault(c, "Off,On @ 0.5")
    cfg = RunConfig.from_items({k: str(v) for k, v in flags.items()}, base=cfg)
    if cfg.input is None:
        raise ConfigError("no input given (config key 'input', --input or --example)")
    if cfg.mode == Mode.FREQUENT.value and cfg.sigma_max is not None:
        _warn("sigma_max is ignored in frequent mode")
    return cfg


def _execute(cfg: RunConfig) -> dict:
    """Run one configuration and return the report dictionary."""
    db_syb = load_symbolic_database(cfg.input, cfg)
    window = cfg.window or len(db_syb) * db_syb.period
    t_max = cfg.t_max if cfg.t_max is not None else window
    mcfg = cfg.mining_config()
    if cfg.t_max is None:
        mcfg = replace(mcfg, t_max=t_max)
    out: dict = {"config": {**cfg.to_dict(), "window": window, "t_max": t_max}, "input": str(cfg.input)}
    exact = approx = None
    if cfg.method in ("exact", "both"):
        t0 = time.perf_counter()
        seq_db = build_sequence_db(db_syb, window, cfg.overlap, t_max)
        split = time.perf_counter() - t0
        exact = mine(seq_db, mcfg)
        exact.timings["split_seconds"] = split
        exact.timings["wall_seconds"] = time.perf_counter() - t0
        out["exact"] = exact.to_dict()
    if cfg.method in ("approximate", "both"):
        t0 = time.perf_counter()
        approx = mine_approximate(db_syb, mcfg, window, cfg.overlap, t_max)
        approx.timings["wall_seconds"] = time.perf_counter() - t0
        out["approximate"] = approx.to_dict()
    if exact is not None and approx is not None:
        out["accuracy"] = accuracy(approx, exact)
    out["_reports"] = (exact, approx)
    return out


def _pattern_text(out: dict) -> str:
    parts = []
    exact, approx = out["_reports"]
    for name, rep in (("exact", exact), ("approximate", approx)):
        if rep is None:
            continue
        parts.append(f"# {name}: {sum(len(v) for v in rep.levels.values())} patterns "
                     f"over {rep.n_sequences} sequences\n")
        for k in sorted(rep.levels):
            parts.append(f"# {k}-event: {len(rep.levels[k])}\n")
        parts.append(rep.table())
    if "accuracy" in out:
        parts.append(f"accuracy: {100 * out['accuracy']:.2f}%\n")
    return "".join(parts)


def cmd_mine(args) -> int:
    cfg = _run_config(args)
    out = _execute(cfg)
    dest = Path(cfg.output)
    dest.mkdir(parents=True, exist_ok=True)
    text = _pattern_text(out)
    out.pop("_reports")
    (dest / "report.json").write_text(json.dumps(out, indent=2, sort_keys=True))
    (dest / "patterns.txt").write_text(text)
    if not args.quiet:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    items = read_flat_config(args.spec)
    for kv in args.set or []:
        key, _, val = kv.partition("=")
        items[key.strip()] = val.strip()
    spec = parse_gen_spec(items)
    db, manifest = generate(spec)
    dest = Path(args.out)
    dest.mkdir(parents=True, exist_ok=True)
    write_csv(db, dest / "data.csv")
    (dest / "manifest.json").write_text(manifest_json(manifest))
    print(f"wrote {len(db.series)} series x {len(db)} timestamps to {dest / 'data.csv'}")
    return 0


_METRIC_FIELDS = ["cell", "method", "status", "wall_seconds", "mi_seconds", "n_patterns", "generated", "candidates",
                  "pruned_apriori", "pruned_transitivity", "pruned_mi", "relation_checks", "peak_live_patterns",
                  "pruned_series_pct", "pruned_pairs_pct", "error"]


def _metrics_row(rep: MiningReport) -> dict:
    c = rep.counters
    row = {
        "wall_seconds": rep.timings.get("wall_seconds", 0.0),
        "mi_seconds": rep.timings.get("mi_seconds", 0.0),
        "n_patterns": sum(len(v) for v in rep.levels.values()),
        "generated": c.generated, "candidates": c.candidates, "pruned_apriori": c.pruned_apriori,
        "pruned_transitivity": c.pruned_transitivity, "pruned_mi": c.pruned_mi,
        "relation_checks": c.relation_checks,
        "peak_live_patterns": max((len(h) for k, h in rep.hlh.items() if k >= 2), default=0),
    }
    if rep.prune_log:
        row["pruned_series_pct"] = rep.prune_log["pruned_series_pct"]
        row["pruned_pairs_pct"] = rep.prune_log["pruned_pairs_pct"]
    return row


def cmd_bench(args) -> int:
    base = RunConfig.from_items(read_flat_config(args.config)) if args.config else RunConfig()
    if args.input:
        base = RunConfig.from_items({"input": args.input}, base=base)
    matrix = read_flat_config(args.matrix)
    keys = sorted(matrix)
    grid = [[v.strip() for v in matrix[k].split(",")] for k in keys]
    extra = sorted({k for k in _METRIC_FIELDS} & set(keys))
    if extra:
        raise ConfigError(f"matrix keys clash with metric columns: {extra}")
    dest = Path(args.out)
    dest.mkdir(parents=True, exist_ok=True)
    rows = []
    for cell_no, values in enumerate(itertools.product(*grid)):
        cell = dict(zip(keys, values))
        try:
            cfg = RunConfig.from_items(cell, base=base)
            if cfg.input is None:
                raise ConfigError("no input")
            out = _execute(cfg)
            exact, approx = out["_reports"]
            for name, rep in (("exact", exact), ("approximate", approx)):
                if rep is not None:
                    rows.append({"cell": cell_no, "method": name, "status": "ok", **cell, **_metrics_row(rep)})
        except Exception as exc:  # one failing cell must not stop the sweep
            rows.append({"cell": cell_no, "method": cell.get("method", base.method), "status": "error",
                         **cell, "error": f"{type(exc).__name__}: {exc}"})
            _warn(f"cell {cell_no} failed: {exc}")
    fields = ["cell"] + keys + [f for f in _METRIC_FIELDS if f != "cell"]
    with open(dest / "metrics.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(dict.fromkeys(fields)), extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    print(f"wrote {len(rows)} rows to {dest / 'metrics.csv'}")
    return 0


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--input", help="wide CSV: timestamp,<series>,...")
    p.add_argument("--window", type=int)
    p.add_argument("--overlap", type=int)
    p.add_argument("--t-max", dest="t_max", type=int)
    p.add_argument("--epsilon", type=int)
    p.add_argument("--d-o", dest="d_o", type=int)
    p.add_argument("--sigma-min", dest="sigma_min", type=float)
    p.add_argument("--sigma-max", dest="sigma_max", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--mode", choices=["frequent", "rare"])
    p.add_argument("--pruning", choices=["none", "apriori", "transitivity", "all"])
    p.add_argument("--max-pattern-len", dest="max_pattern_len", type=int)
    p.add_argument("--method", choices=["exact", "approximate", "both"])
    p.add_argument("--alphabet", help="default alphabet for numeric columns, e.g. quantile:3 or 'Off,On @ 0.5'")
    p.add_argument("--output", "--out", dest="output", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tpmine", description="Temporal pattern mining over multivariate time series.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine patterns and write report.json and patterns.txt")
    _add_run_flags(p)
    p.add_argument("--example", action="store_true", help="use the bundled appliance example as input")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("gen", help="generate a synthetic CSV and manifest")
    p.add_argument("--spec", required=True, help="generator spec (flat key = value)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one spec key")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a configuration matrix and write metrics.csv")
    p.add_argument("--config", help="base configuration")
    p.add_argument("--input")
    p.add_argument("--matrix", required=True, help="flat file: key = v1, v2, ...")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, IngestionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
