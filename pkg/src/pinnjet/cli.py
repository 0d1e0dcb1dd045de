"""Experiment runner.

Subcommands:
  run <config.json>   execute a (variant x seed) training matrix and write
                      every artifact (traces, reports, heatmaps, slices,
                      parameter snapshots, summary table)
  validate            run the fast property checks and print a table
  list-problems       show the registered benchmark problems

Config schema (JSON object; unknown keys are rejected):
  problem          required, one of the registered problem names
  variants         list from {std, lda, gc, acr}; default all four
  seeds            list of ints; default the benchmark protocol seeds
  iterations       int >= 0; default the per-problem protocol count
  learning_rate    float; default 1e-3
  log_every        int; trace cadence, default 100
  lambda_pde, lambda_ic, lambda_bc   task weights, default 1.0
  output_dir       artifact directory; relative paths are rooted at
                   $PINNJET_OUTPUT_ROOT (default ./runs)
  eval_resolution  [n0, n1] grid override; default per problem
  jobs             parallel runs; default 1
  paper_mode       true pins variants/seeds/iterations to the benchmark
                   protocol regardless of the other fields

Exit codes: 0 all runs succeeded, 1 usage error, 2 numeric failure in at
least one run (remaining runs still execute and are reported).

One collocation set is sampled per seed and shared by every variant, so
compared models see identical points; each run's report records the point
set hash so this is checkable after the fact.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import pathlib
import sys

import numpy as np

from pinnjet.errors import ConfigurationError, PinnjetError, UsageError
from pinnjet.metrics import (aggregate_runs, evaluate_on_grid, slice_extract,
                             write_heatmap_csv, write_slice_csv,
                             write_summary_csv)
from pinnjet.networks import from_flat, save_params
from pinnjet.problems import (DEFAULT_HIDDEN, DEFAULT_ITERATIONS,
                              PROBLEM_NAMES, default_network_config,
                              get_problem)
from pinnjet.sampling import sample_problem_points
from pinnjet.training import VARIANTS, TrainingConfig, train_single

PAPER_SEEDS = (1234, 1235, 1236, 1237, 1238)

# Profile lines extracted alongside each heatmap, per problem: axis name and
# slice coordinates.
DEFAULT_SLICES = {
    "burgers": ("t", (0.25, 0.5, 0.99)),
    "helmholtz14": ("x", (0.75,)),
    "helmholtz44": ("x", (0.75,)),
    "klein_gordon": ("t", (0.5, 0.99)),
    "cavity": ("y", (0.8,)),
}

_CONFIG_FIELDS = {
    "problem", "variants", "seeds", "iterations", "learning_rate",
    "log_every", "lambda_pde", "lambda_ic", "lambda_bc", "output_dir",
    "eval_resolution", "jobs", "paper_mode",
}


@dataclasses.dataclass
class ExperimentConfig:
    problem: str
    variants: tuple = VARIANTS
    seeds: tuple = PAPER_SEEDS
    iterations: int | None = None
    learning_rate: float = 1e-3
    log_every: int = 100
    lambda_pde: float = 1.0
    lambda_ic: float = 1.0
    lambda_bc: float = 1.0
    output_dir: str | None = None
    eval_resolution: tuple | None = None
    jobs: int = 1
    paper_mode: bool = False

    def __post_init__(self):
        if self.problem not in PROBLEM_NAMES:
            raise UsageError(
                f"config.problem: unknown problem {self.problem!r}; "
                f"choose from {', '.join(PROBLEM_NAMES)}"
            )
        if self.paper_mode:
            self.variants = VARIANTS
            self.seeds = PAPER_SEEDS
            self.iterations = DEFAULT_ITERATIONS[self.problem]
        self.variants = tuple(str(v).lower() for v in self.variants)
        for v in self.variants:
            if v not in VARIANTS:
                raise UsageError(
                    f"config.variants: unknown variant {v!r}; "
                    f"choose from {', '.join(VARIANTS)}"
                )
        if not self.variants:
            raise UsageError("config.variants: empty")
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.seeds:
            raise UsageError("config.seeds: empty")
        if self.iterations is None:
            self.iterations = DEFAULT_ITERATIONS[self.problem]
        if self.iterations < 0:
            raise UsageError("config.iterations: must be >= 0")
        if self.log_every < 1:
            raise UsageError("config.log_every: must be >= 1")
        if self.jobs < 1:
            raise UsageError("config.jobs: must be >= 1")
        if self.eval_resolution is not None:
            res = tuple(int(n) for n in self.eval_resolution)
            if len(res) != 2 or min(res) < 1:
                raise UsageError(
                    "config.eval_resolution: expected two positive integers"
                )
            self.eval_resolution = res

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise UsageError("config: top level must be a JSON object")
        unknown = set(data) - _CONFIG_FIELDS
        if unknown:
            raise UsageError(f"config.{sorted(unknown)[0]}: unknown field")
        if "problem" not in data:
            raise UsageError("config.problem: required")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def training_config(self, variant: str) -> TrainingConfig:
        return TrainingConfig(
            variant=variant, iterations=self.iterations,
            learning_rate=self.learning_rate, log_every=self.log_every,
            lambda_pde=self.lambda_pde, lambda_ic=self.lambda_ic,
            lambda_bc=self.lambda_bc,
        )

    def resolved_output_dir(self) -> pathlib.Path:
        root = pathlib.Path(os.environ.get("PINNJET_OUTPUT_ROOT", "runs"))
        sub = pathlib.Path(self.output_dir) if self.output_dir else pathlib.Path(self.problem)
        return sub if sub.is_absolute() else root / sub

    def echo(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["variants"] = list(self.variants)
        doc["seeds"] = list(self.seeds)
        doc["eval_resolution"] = (list(self.eval_resolution)
                                  if self.eval_resolution else None)
        doc["resolved_output_dir"] = str(self.resolved_output_dir())
        return doc


def _write_run_artifacts(out_dir: pathlib.Path, report, problem, config):
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=1)
        fh.write("\n")
    if report.params_flat is None:
        return
    net = default_network_config(problem, TrainingConfig(
        variant=report.variant, iterations=0).architecture)
    params = from_flat(net, np.asarray(report.params_flat))
    save_params(params, out_dir / "params.json")
    if report.aborted:
        return
    ev = evaluate_on_grid(params, problem, config.eval_resolution)
    write_heatmap_csv(out_dir / "heatmap.csv", ev)
    axis, values = DEFAULT_SLICES[problem.name]
    for value in values:
        profile = slice_extract(ev, axis, value)
        tag = repr(value).replace(".", "p").replace("-", "m")
        write_slice_csv(out_dir / f"slice_{axis}{tag}.csv", profile)


def _run_one(config: ExperimentConfig, variant: str, seed: int,
             points, out_root: pathlib.Path):
    problem = get_problem(config.problem)
    out_dir = out_root / variant / f"seed{seed}"
    out_dir.mkdir(parents=True, exist_ok=True)
    report = train_single(
        problem, config.training_config(variant), seed, points=points,
        trace_path=out_dir / "trace.jsonl",
        eval_resolution=config.eval_resolution,
    )
    _write_run_artifacts(out_dir, report, problem, config)
    return report


def _matrix_entry(args):
    """Module-level wrapper so a process pool can execute one run."""
    config_doc, variant, seed = args
    config = ExperimentConfig.from_dict(config_doc)
    problem = get_problem(config.problem)
    points = sample_problem_points(problem, seed)
    return variant, seed, _run_one(config, variant, seed, points,
                                   config.resolved_output_dir())


def run_experiment(config: ExperimentConfig, log=print) -> int:
    """Execute the full matrix; returns the process exit code."""
    problem = get_problem(config.problem)
    out_root = config.resolved_output_dir()
    out_root.mkdir(parents=True, exist_ok=True)
    with open(out_root / "config.json", "w") as fh:
        json.dump(config.echo(), fh, indent=1)
        fh.write("\n")

    reports: dict[str, list] = {v: [] for v in config.variants}
    jobs = [(variant, seed) for variant in config.variants
            for seed in config.seeds]
    if config.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        echo = config.echo()
        echo.pop("resolved_output_dir")
        work = [(echo, v, s) for v, s in jobs]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for variant, seed, report in pool.map(_matrix_entry, work):
                reports[variant].append(report)
                _log_run(log, report)
    else:
        points_cache: dict[int, object] = {}
        for variant, seed in jobs:
            if seed not in points_cache:
                points_cache[seed] = sample_problem_points(problem, seed)
            report = _run_one(config, variant, seed, points_cache[seed],
                              out_root)
            reports[variant].append(report)
            _log_run(log, report)

    rows = []
    failed = False
    for variant in config.variants:
        done = [r for r in reports[variant] if not r.aborted]
        failed = failed or len(done) < len(reports[variant])
        if not done:
            continue
        summary = aggregate_runs(done)
        rows.append({
            "model": variant, "iterations": config.iterations,
            "rel_l2_mean": summary.rel_l2_mean,
            "rel_l2_std": summary.rel_l2_std,
            "rel_linf_mean": summary.rel_linf_mean,
            "rel_linf_std": summary.rel_linf_std,
        })
    if rows:
        write_summary_csv(out_root / "summary.csv", rows)
        log(f"summary written to {out_root / 'summary.csv'}")
    return 2 if failed else 0


def _log_run(log, report):
    if report.aborted:
        log(f"{report.problem} {report.variant} seed {report.seed}: "
            f"ABORTED ({report.error})")
    else:
        log(f"{report.problem} {report.variant} seed {report.seed}: "
            f"rel_l2 {report.rel_l2:.4e} rel_linf {report.rel_linf:.4e} "
            f"points {report.points_hash[:12]} "
            f"wall {report.wall_time:.1f}s")


# ---------------------------------------------------------------------------
# Validation suite: fast property checks, no training.
# ---------------------------------------------------------------------------

def _check_jet_ops():
    """Every analytic op's jet coefficients against central finite differences."""
    from pinnjet import jets
    from pinnjet.oracles import finite_diff_partial

    rng = np.random.default_rng(20240501)
    pts = rng.uniform(0.3, 0.9, size=(4, 2))
    entries = []

    def scalar(fn, pt):
        x, y = pt
        base = np.sin(x) + 0.5 * x * y
        other = 0.3 * x - 0.2 * y * y
        return fn(base, other)

    def jetval(fn, pt):
        xj = jets.seed_input(0, pt[0], 2, 2)
        yj = jets.seed_input(1, pt[1], 2, 2)
        base = xj.sin() + (xj * yj) * 0.5
        other = xj * 0.3 - (yj * yj) * 0.2
        return fn(base, other)

    ops = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "neg": lambda a, b: -a,
        "scale": lambda a, b: a * 1.7,
        "tanh": lambda a, b: (a * b).tanh() if hasattr(a, "tanh") else np.tanh(a * b),
        "sigmoid": lambda a, b: (a + b).sigmoid() if hasattr(a, "sigmoid")
                    else 1.0 / (1.0 + np.exp(-(a + b))),
        "exp": lambda a, b: a.exp() if hasattr(a, "exp") else np.exp(a),
        "sin": lambda a, b: a.sin() if hasattr(a, "sin") else np.sin(a),
        "cos": lambda a, b: a.cos() if hasattr(a, "cos") else np.cos(a),
        "sqrt": lambda a, b: (a + 2.0).sqrt() if hasattr(a, "sqrt")
                 else np.sqrt(a + 2.0),
        "reciprocal": lambda a, b: (a + 2.0).reciprocal() if hasattr(a, "reciprocal")
                       else 1.0 / (a + 2.0),
    }
    sp = jets.jet_space(2, 2)
    for name, fn in ops.items():
        worst = 0.0
        for pt in pts:
            out = jetval(fn, pt)
            for alpha in sp.mi:
                got = float(out.derivative(alpha))
                ref = finite_diff_partial(lambda q: scalar(fn, q), pt, alpha)
                worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
        entries.append((f"jet/{name}", worst < 1e-5, f"max rel dev {worst:.2e}"))
    return entries


def _check_param_gradients():
    from pinnjet.networks import (NetworkConfig, forward, init_params,
                                  input_jet, to_flat)
    from pinnjet.tape import Tape, backward

    rng = np.random.default_rng(7119)
    entries = []
    for arch in ("mlp", "lda"):
        config = NetworkConfig(input_dim=2, hidden=(6, 6), output_dim=1,
                               architecture=arch, seed=5)
        flat0 = to_flat(init_params(config, 5))
        pts = rng.uniform(-1, 1, size=(7, 2))

        def loss_of(flat):
            params = from_flat(config, flat.copy())
            tape = Tape()
            out = forward(params, tape.input(input_jet(pts, 2)), tape=tape)
            total = None
            for alpha in out.jet.space.mi:
                term = out.d(alpha).sum_sq()
                total = term if total is None else total + term
            return tape, total

        tape, total = loss_of(flat0)
        grad = backward(tape, total, flat0.size)
        h = 1e-6
        worst = 0.0
        for k in rng.choice(flat0.size, size=10, replace=False):
            fp = flat0.copy(); fp[k] += h
            fm = flat0.copy(); fm[k] -= h
            lp = loss_of(fp)[1].jet.coeffs[0]
            lm = loss_of(fm)[1].jet.coeffs[0]
            fd = (lp - lm) / (2 * h)
            worst = max(worst, abs(grad[k] - fd) / max(1.0, abs(fd)))
        entries.append((f"tape/param-grad-{arch}", worst < 1e-5,
                        f"max rel dev {worst:.2e}"))
    return entries


def _check_pcgrad():
    from pinnjet.training import TaskGradients, pcgrad_resolve

    rng = np.random.default_rng(88331)
    n_inst = 1000
    coop_ok = orth_ok = anti_ok = norm_ok = True
    for _ in range(n_inst):
        k = int(rng.integers(2, 4))
        gs = [rng.normal(size=5) for _ in range(k)]
        names = tuple(f"t{i}" for i in range(k))
        tg = TaskGradients(names, {n: 0.0 for n in names},
                           dict(zip(names, gs)))
        if all(float(gs[i] @ gs[j]) >= 0.0
               for i in range(k) for j in range(k) if i != j):
            out = pcgrad_resolve(tg, rng)
            plain = np.zeros(5)
            for g in gs:
                plain += g
            coop_ok &= np.array_equal(out, plain)
        else:
            pcgrad_resolve(tg, rng)
        # orthogonality and norm checks on an explicit 2-task projection
        g1, g2 = rng.normal(size=4), rng.normal(size=4)
        if g1 @ g2 < 0:
            proj = g1 - (g1 @ g2) / (g2 @ g2) * g2
            orth_ok &= proj @ g2 >= -1e-12
            norm_ok &= np.linalg.norm(proj) <= np.linalg.norm(g1) + 1e-12
    g = rng.normal(size=6)
    tg = TaskGradients(("a", "b"), {"a": 0.0, "b": 0.0}, {"a": g, "b": -g})
    anti = pcgrad_resolve(tg, rng)
    anti_ok = np.allclose(anti, 0.0, atol=1e-12)
    return [
        ("pcgrad/cooperation", bool(coop_ok), "pass-through equals plain sum"),
        ("pcgrad/orthogonality", bool(orth_ok), "g~.g >= -1e-12 after projection"),
        ("pcgrad/antiparallel", bool(anti_ok), "opposite gradients cancel"),
        ("pcgrad/norm", bool(norm_ok), "projection never grows a gradient"),
    ]


def _check_lda_reduction():
    from pinnjet.networks import (NetworkConfig, _block_shapes, forward,
                                  init_params, input_jet, to_flat)

    rng = np.random.default_rng(4242)
    ok = True
    for name in PROBLEM_NAMES:
        problem = get_problem(name)
        hidden = DEFAULT_HIDDEN[name]
        cfg_m = NetworkConfig(2, hidden, problem.output_dim, "mlp", seed=1)
        cfg_l = NetworkConfig(2, hidden, problem.output_dim, "lda", seed=1)
        fm = to_flat(init_params(cfg_m, 1))
        fl = to_flat(init_params(cfg_l, 1)).copy()
        off = 0
        src = iter(np.split(fm, np.cumsum([o * i + o for _, o, i
                                           in _block_shapes(cfg_m)])[:-1]))
        for bname, o, i in _block_shapes(cfg_l):
            n = o * i + o
            backbone = bname.endswith(".backbone") or bname == "output"
            fl[off:off + n] = next(src) if backbone else 0.0
            off += n
        pts = rng.uniform(-1, 1, size=(100, 2))
        xj = input_jet(pts, min(problem.order, 3))
        om = forward(from_flat(cfg_m, fm), xj).jet.coeffs
        ol = forward(from_flat(cfg_l, fl), xj).jet.coeffs
        ok &= np.array_equal(om, ol)
    return [("network/lda-reduction", bool(ok),
             "zeroed extras reproduce the MLP bitwise at 100 points")]


def _check_residuals():
    from pinnjet import jets
    from pinnjet.oracles import burgers_cole_hopf_jet
    from pinnjet.problems import (residual_burgers, residual_cavity,
                                  residual_helmholtz, residual_klein_gordon)

    entries = []
    rng = np.random.default_rng(515)

    pts = rng.uniform(-0.9, 0.9, size=(40, 2))
    prob = get_problem("helmholtz14")
    xj = jets.seed_input(0, pts[:, 0], 2, 2)
    yj = jets.seed_input(1, pts[:, 1], 2, 2)
    a1, a2, k = prob.constants["a1"], prob.constants["a2"], prob.constants["k"]
    u = (xj * (a1 * np.pi)).sin() * (yj * (a2 * np.pi)).sin()
    r = residual_helmholtz(u, pts, k, a1, a2)
    worst = float(np.max(np.abs(r.value)))
    entries.append(("residual/helmholtz", worst < 1e-8, f"max |r| {worst:.2e}"))

    prob = get_problem("klein_gordon")
    pts = rng.uniform(0.05, 0.95, size=(40, 2))
    xj = jets.seed_input(0, pts[:, 0], 2, 2)
    tj = jets.seed_input(1, pts[:, 1], 2, 2)
    u = xj * (tj * (5 * np.pi)).cos() + (xj * tj) ** 3
    kwargs = {key: prob.constants[key]
              for key in ("alpha", "beta", "gamma", "exponent")}
    r = residual_klein_gordon(u, pts, **kwargs)
    worst = float(np.max(np.abs(r.value)))
    entries.append(("residual/klein-gordon", worst < 1e-8, f"max |r| {worst:.2e}"))

    prob = get_problem("burgers")
    nu = prob.constants["nu"]
    pts = np.column_stack([rng.uniform(-0.8, 0.8, 25), rng.uniform(0.1, 0.9, 25)])
    xj = jets.seed_input(0, pts[:, 0], 2, 2)
    tj = jets.seed_input(1, pts[:, 1], 2, 2)
    u = burgers_cole_hopf_jet(xj, tj, nu)
    r = residual_burgers(u, nu)
    worst = float(np.max(np.abs(r.value)))
    entries.append(("residual/burgers-oracle", worst < 1e-4, f"max |r| {worst:.2e}"))

    pts = rng.uniform(0.1, 0.9, size=(25, 2))
    yj = jets.seed_input(1, pts[:, 1], 2, 3)
    psi = (yj * yj) * (yj * 0.5)          # psi = y^3/2: shear u = 1.5 y^2
    p = jets.constant(np.zeros(25), 2, 3)
    re = get_problem("cavity").constants["re"]
    rx, ry = residual_cavity(psi, p, re)
    # x-momentum balances the shear's viscous term exactly: rx = -3/Re
    worst = float(max(np.max(np.abs(rx.value + 3.0 / re)),
                      np.max(np.abs(ry.value))))
    entries.append(("residual/cavity-shear", worst < 1e-8, f"max |r| {worst:.2e}"))
    return entries


def _check_stratification():
    from pinnjet.sampling import lhs_sample

    ok = True
    detail = []
    for n in (100, 1000, 10000):
        for dims in (1, 2):
            bounds = ((0.0, 1.0),) * dims
            pts = lhs_sample(n, dims, bounds, seed=999 + n + dims)
            for j in range(dims):
                counts = np.bincount(
                    np.minimum((pts[:, j] * n).astype(int), n - 1), minlength=n)
                ok &= bool(np.all(counts == 1))
    detail = "one point per stratum, n in {100,1000,10000}, dims in {1,2}"
    return [("sampling/stratification", bool(ok), detail)]


def validate_suite():
    """All fast property checks; returns [(name, passed, detail), ...]."""
    entries = []
    entries += _check_jet_ops()
    entries += _check_param_gradients()
    entries += _check_pcgrad()
    entries += _check_lda_reduction()
    entries += _check_residuals()
    entries += _check_stratification()
    return entries


def _cmd_validate(log=print) -> int:
    entries = validate_suite()
    width = max(len(name) for name, _, _ in entries)
    failures = 0
    for name, passed, detail in entries:
        status = "PASS" if passed else "FAIL"
        failures += not passed
        log(f"{name:<{width}}  {status}  {detail}")
    log(f"{len(entries) - failures}/{len(entries)} checks passed")
    return 2 if failures else 0


def _cmd_list_problems(log=print) -> int:
    for name in PROBLEM_NAMES:
        problem = get_problem(name)
        log(f"{name:13s} order {problem.order}, outputs {problem.output_dim}, "
            f"tasks {'/'.join(problem.tasks)}, "
            f"interior {problem.n_interior}, hidden {DEFAULT_HIDDEN[name]}, "
            f"iterations {DEFAULT_ITERATIONS[name]}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinnjet", description="PDE benchmark experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a training matrix from a config")
    run_p.add_argument("config", help="path to a JSON experiment config")
    run_p.add_argument("--variants", help="comma list overriding config.variants")
    run_p.add_argument("--seeds", help="comma list overriding config.seeds")
    run_p.add_argument("--iterations", type=int, help="override config.iterations")
    run_p.add_argument("--output", help="override config.output_dir")
    run_p.add_argument("--jobs", type=int, help="override config.jobs")

    sub.add_parser("validate", help="run the fast property checks")
    sub.add_parser("list-problems", help="list registered problems")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate()
        if args.command == "list-problems":
            return _cmd_list_problems()
        config = ExperimentConfig.from_file(args.config)
        overrides = {}
        if args.variants:
            overrides["variants"] = tuple(args.variants.split(","))
        if args.seeds:
            overrides["seeds"] = tuple(int(s) for s in args.seeds.split(","))
        if args.iterations is not None:
            overrides["iterations"] = args.iterations
        if args.output:
            overrides["output_dir"] = args.output
        if args.jobs is not None:
            overrides["jobs"] = args.jobs
        if overrides:
            doc = dataclasses.asdict(config)
            doc.pop("paper_mode")  # explicit overrides beat the preset
            doc.update(overrides)
            config = ExperimentConfig(**doc)
        return run_experiment(config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, PinnjetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
