"""Copy the light artifacts of finished runs into a results directory.

Keeps summary.csv, config.json, and per-seed trace.jsonl / report.json.
Heatmaps and parameter dumps stay behind; they are large and easy to
regenerate from the committed configs.
"""

import argparse
import pathlib
import shutil
import sys

LIGHT_FILES = ("trace.jsonl", "report.json")


def harvest(src_root: pathlib.Path, dst_root: pathlib.Path) -> int:
    copied = 0
    for run_dir in sorted(p for p in src_root.iterdir() if p.is_dir()):
        summary = run_dir / "summary.csv"
        if not summary.is_file():
            continue
        dst_run = dst_root / run_dir.name
        dst_run.mkdir(parents=True, exist_ok=True)
        shutil.copy2(summary, dst_run / "summary.csv")
        copied += 1
        config = run_dir / "config.json"
        if config.is_file():
            shutil.copy2(config, dst_run / "config.json")
            copied += 1
        for seed_dir in sorted(run_dir.glob("*/seed*")):
            if not seed_dir.is_dir():
                continue
            dst_seed = dst_run / seed_dir.parent.name / seed_dir.name
            dst_seed.mkdir(parents=True, exist_ok=True)
            for name in LIGHT_FILES:
                f = seed_dir / name
                if f.is_file():
                    shutil.copy2(f, dst_seed / name)
                    copied += 1
    return copied


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", nargs="?", default="/root/runs",
                    help="directory holding finished run outputs")
    ap.add_argument("--dest", default="results",
                    help="destination directory (default: results)")
    args = ap.parse_args(argv)
    src = pathlib.Path(args.source)
    if not src.is_dir():
        print(f"no such directory: {src}", file=sys.stderr)
        return 1
    dst = pathlib.Path(args.dest)
    n = harvest(src, dst)
    print(f"copied {n} files into {dst}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
