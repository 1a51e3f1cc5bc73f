"""Command-line entry point: run, sweep, aggregate, list.

Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.
All outputs land under <outdir>/<run_id>/.
"""
from __future__ import annotations

import argparse
import json
import multiprocessing
import os
import sys
from pathlib import Path

from . import harness, metrics
from .config import ALGORITHMS, load_config, run_id

GAMES = ("rps", "stag_hunt", "battle_of_sexes", "markov_resource")


class ConfigError(Exception):
    pass


def parse_seeds(spec: str) -> list[int]:
    """Accepts 'A..B' (inclusive) or a comma-separated list."""
    if ".." in spec:
        lo, _, hi = spec.partition("..")
        a, b = int(lo), int(hi)
        if b < a:
            raise ConfigError(f"empty seed range {spec!r}")
        return list(range(a, b + 1))
    return [int(s) for s in spec.split(",") if s.strip()]


def _resolve_outdir(args) -> Path:
    outdir = args.outdir or os.environ.get("COEVO_OUTDIR")
    if not outdir:
        raise ConfigError("no output directory: pass --outdir or set COEVO_OUTDIR")
    return Path(outdir)


def _load(args) -> dict:
    if args.config is not None and not Path(args.config).is_file():
        raise ConfigError(f"config file not found: {args.config}")
    try:
        return load_config(args.config, args.set, preset=args.preset)
    except (ValueError, json.JSONDecodeError) as e:
        raise ConfigError(str(e)) from e


def cmd_run(args) -> int:
    cfg = _load(args)
    outdir = _resolve_outdir(args)
    seed = int(args.seed)
    csv_text = metrics.records_to_csv(harness.run_seed(cfg, seed))
    run_dir = harness.write_run(outdir, cfg, {seed: csv_text})
    print(run_dir)
    return 0


def _sweep_one(job: tuple[str, int]) -> tuple[int, str | None, str | None]:
    try:
        seed, csv_text = harness._run_seed_json(job)
        return seed, csv_text, None
    except Exception as e:  # reported per seed, sweep keeps going
        return job[1], None, f"{type(e).__name__}: {e}"


def cmd_sweep(args) -> int:
    cfg = _load(args)
    outdir = _resolve_outdir(args)
    seeds = parse_seeds(args.seeds)
    if not seeds:
        raise ConfigError("sweep needs at least one seed")
    jobs = [(json.dumps(cfg), s) for s in seeds]
    if args.parallelism > 1 and len(jobs) > 1:
        with multiprocessing.Pool(args.parallelism) as pool:
            results = pool.map(_sweep_one, jobs)
    else:
        results = [_sweep_one(j) for j in jobs]
    failures = [(s, err) for s, _, err in results if err is not None]
    for s, err in failures:
        print(f"seed {s} failed: {err}", file=sys.stderr)
    ok = {s: text for s, text, err in results if err is None}
    if ok:
        run_dir = harness.write_run(outdir, cfg, ok)
        print(run_dir)
    return 1 if failures or not ok else 0


def cmd_aggregate(args) -> int:
    run_dir = Path(args.dir)
    seed_files = sorted(run_dir.glob("seed_*.csv"))
    if not seed_files:
        raise ConfigError(f"no seed CSVs in {run_dir}")
    streams = [metrics.parse_csv(p.read_text()) for p in seed_files]
    agg = metrics.aggregate(streams)
    (run_dir / "aggregate.csv").write_text(metrics.aggregate_to_csv(agg))
    print(run_dir / "aggregate.csv")
    return 0


def cmd_list(args) -> int:
    print("games:")
    for g in GAMES:
        print(f"  {g}")
    print("algorithms:")
    for a in ALGORITHMS:
        print(f"  {a}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coevogov", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, seeds: bool):
        p.add_argument("--config", default=None, help="JSON config file (defaults apply)")
        p.add_argument("--preset", default=None, choices=GAMES,
                       help="start from the tuned per-game settings instead of bare defaults")
        p.add_argument("--outdir", default=None, help="output root (or COEVO_OUTDIR)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="dotted-path config override, repeatable")
        if seeds:
            p.add_argument("--seeds", required=True, help="seed range A..B or comma list")
            p.add_argument("--parallelism", type=int, default=1)
        else:
            p.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("run", help="run one seed"), seeds=False)
    common(sub.add_parser("sweep", help="run a seed batch and aggregate"), seeds=True)
    agg = sub.add_parser("aggregate", help="(re)build aggregate.csv from seed CSVs")
    agg.add_argument("dir", help="run directory containing seed_*.csv")
    sub.add_parser("list", help="list games and algorithms")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "sweep": cmd_sweep, "aggregate": cmd_aggregate, "list": cmd_list}[args.verb]
    try:
        return handler(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
