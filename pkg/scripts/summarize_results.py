"""Tabulate finished runs: per-variant error means and per-seed detail.

Walks one or more output directories produced by `pinnjet run`, reads each
run's report.json, recomputes the aggregate table, and prints it alongside
the per-seed errors so variant comparisons are visible at a glance.

Usage:

    python3 scripts/summarize_results.py runs/burgers runs/cavity
    python3 scripts/summarize_results.py runs/*          # shell glob
"""

from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

VARIANT_ORDER = ("std", "lda", "gc", "acr")


def load_reports(root: pathlib.Path) -> dict:
    by_variant: dict[str, list] = {}
    for path in sorted(root.glob("*/seed*/report.json")):
        rep = json.loads(path.read_text())
        by_variant.setdefault(rep["variant"], []).append(rep)
    return by_variant


def fmt(x) -> str:
    return f"{x:.4e}" if x is not None else "   aborted"


def print_root(root: pathlib.Path) -> None:
    by_variant = load_reports(root)
    if not by_variant:
        print(f"{root}: no reports found")
        return
    name = next(iter(by_variant.values()))[0]["problem"]
    print(f"\n== {name}  ({root})")
    order = [v for v in VARIANT_ORDER if v in by_variant]
    order += sorted(set(by_variant) - set(order))
    for variant in order:
        reps = sorted(by_variant[variant], key=lambda r: r["seed"])
        done = [r for r in reps if not r["aborted"]]
        line = f"  {variant:<4}"
        if done:
            l2 = [r["rel_l2"] for r in done]
            li = [r["rel_linf"] for r in done]
            line += (f" rel_l2 mean {sum(l2) / len(l2):.4e}"
                     f"  rel_linf mean {sum(li) / len(li):.4e}"
                     f"  ({len(done)}/{len(reps)} seeds)")
        else:
            line += "  all seeds aborted"
        print(line)
        for r in reps:
            print(f"       seed {r['seed']}: rel_l2 {fmt(r['rel_l2'])}"
                  f"  rel_linf {fmt(r['rel_linf'])}"
                  f"  iters {r['iterations']}  wall {r['wall_time']:.0f}s")


def main(argv=None) -> int:
    roots = [pathlib.Path(a) for a in (argv or sys.argv[1:])]
    if not roots:
        default = pathlib.Path("runs")
        roots = sorted(p for p in default.iterdir() if p.is_dir()) \
            if default.is_dir() else []
    if not roots:
        print("no output directories given and ./runs is empty", file=sys.stderr)
        return 1
    for root in roots:
        print_root(root)
    return 0


if __name__ == "__main__":
    sys.exit(main())
