"""Command-line entry point: ``fracks run|presets|verify``."""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .exceptions import ConfigurationError
from .config import SchemaError, dump_config, list_presets, load_config, preset_config
from .outputs import write_csv, write_metadata, write_svg
from .spectral_core import save_snapshot
from .studies import NumericalFailure, run_study

EXIT_OK = 0
EXIT_MISSING = 2
EXIT_SCHEMA = 3
EXIT_NUMERICAL = 4


def _emit(cfg, result, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.resolved.yaml").write_text(dump_config(cfg))
    written = []
    for name in sorted(result.tables):
        cols, rows = result.tables[name]
        written.append(write_csv(out_dir / f"{name}.csv", cols, rows))
    for p in result.plots:
        written.append(write_svg(out_dir / f"{p.name}.svg", p.x, p.y, p.xlabel, p.ylabel, p.loglog))
    for name, field in sorted(result.snapshots.items()):
        written.append(save_snapshot(field, out_dir / f"{name}.npz"))
    written.append(write_metadata(out_dir / "run_metadata.txt", cfg, result.summary))
    return written


def _run(args) -> int:
    try:
        if args.preset:
            cfg = preset_config(args.preset, args.seed, args.out)
        else:
            if args.config is None:
                print("error: give a config path or --preset NAME", file=sys.stderr)
                return EXIT_SCHEMA
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg["seed"] = int(args.seed)
            if args.out is not None:
                cfg["output"] = str(args.out)
    except FileNotFoundError as exc:
        print(f"error: config file not found: {exc.filename}", file=sys.stderr)
        return EXIT_MISSING
    except SchemaError as exc:
        print("error: invalid configuration; offending keys:", file=sys.stderr)
        for p in exc.problems:
            print(f"  {p}", file=sys.stderr)
        return EXIT_SCHEMA

    out_dir = Path(cfg["output"])
    print(dump_config(cfg), end="")
    try:
        result = run_study(cfg)
    except NumericalFailure as exc:
        out_dir.mkdir(parents=True, exist_ok=True)
        diag = out_dir / "diagnostics.txt"
        lines = [f"numerical failure: {exc}"] + [f"{k}: {v}" for k, v in sorted(exc.diagnostics.items())]
        lines.append(traceback.format_exc())
        diag.write_text("\n".join(lines))
        print(f"error: numerical failure; diagnostics in {diag}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigurationError as exc:
        print(f"error: invalid parameter value: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    _emit(cfg, result, out_dir)
    for k in sorted(result.summary):
        print(f"# {k}: {result.summary[k]}")
    print(f"# outputs written to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracks", description="fractional Keller-Segel experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a study from a YAML config or a preset")
    r.add_argument("config", nargs="?", help="YAML config file")
    r.add_argument("--preset", help="named preset (see `fracks presets`)")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="output directory")
    sub.add_parser("presets", help="list presets")
    sub.add_parser("verify", help="run the invariant suite")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name, desc in list_presets():
            print(f"{name:<22} {desc}")
        return EXIT_OK
    if args.command == "verify":
        from .verify import run_checks

        return EXIT_OK if run_checks() else 1
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
