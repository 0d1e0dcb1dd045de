"""Run the benchmark training matrices from the bundled config files.

Each problem config in configs/ pins the full protocol (all four model
variants, seeds 1234-1238, the published iteration budgets).  A full
reproduction is a multi-day job on one core; pass --smoke for a minutes-long
end-to-end exercise of the same pipeline, or --iterations to cap budgets.

Usage, from the repository root:

    python3 scripts/run_benchmarks.py                      # everything
    python3 scripts/run_benchmarks.py burgers cavity       # a subset
    python3 scripts/run_benchmarks.py --smoke
    python3 scripts/run_benchmarks.py burgers --iterations 2000 --seeds 1234

Outputs land under PINNJET_OUTPUT_ROOT (default ./runs), one directory per
problem with per-variant/per-seed traces, reports, fields, and summary.csv.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from pinnjet.cli import main as cli_main  # noqa: E402

CONFIG_DIR = pathlib.Path(__file__).resolve().parents[1] / "configs"
PROBLEMS = ("burgers", "helmholtz14", "helmholtz44", "klein_gordon", "cavity")


def parse_args(argv):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("problems", nargs="*", default=[],
                    help=f"subset of {', '.join(PROBLEMS)} (default: all)")
    ap.add_argument("--smoke", action="store_true",
                    help="run the small single-seed smoke config instead")
    ap.add_argument("--iterations", type=int,
                    help="cap the iteration budget of every selected run")
    ap.add_argument("--seeds", help="comma list overriding the seed set")
    ap.add_argument("--variants", help="comma list overriding the variants")
    ap.add_argument("--jobs", type=int, help="parallel worker processes")
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.smoke:
        jobs = [CONFIG_DIR / "smoke.json"]
    else:
        names = args.problems or list(PROBLEMS)
        unknown = sorted(set(names) - set(PROBLEMS))
        if unknown:
            print(f"unknown problem(s): {', '.join(unknown)}", file=sys.stderr)
            return 1
        jobs = [CONFIG_DIR / f"{name}.json" for name in names]

    passthrough = []
    for flag in ("iterations", "seeds", "variants", "jobs"):
        value = getattr(args, flag)
        if value is not None:
            passthrough += [f"--{flag}", str(value)]

    worst = 0
    for config in jobs:
        print(f"=== {config.stem}")
        rc = cli_main(["run", str(config), *passthrough])
        worst = max(worst, rc)
        if rc != 0:
            print(f"{config.stem}: exited {rc}", file=sys.stderr)
    return worst


if __name__ == "__main__":
    sys.exit(main())
