"""Task losses, per-task gradients, conflict-resolved combining, Adam, training.

Each training iteration evaluates one loss per task (PDE residual plus the
problem's condition tasks) on its own tape, takes per-task parameter
gradients, combines them, and applies one full-batch Adam update:

    variant   architecture   combiner
    std       mlp            weighted sum
    lda       lda            weighted sum
    gc        mlp            conflict-resolved projection
    acr       lda            conflict-resolved projection

The conflict resolver treats tasks pairwise: each task's working gradient
is projected off every original gradient it conflicts with (negative dot
product), visiting the others in a fresh random order per task drawn from
the dedicated projection RNG stream; the resolved gradients are summed.

Task losses are mean squared residuals/deviations, normalized by the number
of distinct points in the task (batches that share points, like a value and
a velocity condition at the same initial points, divide by the shared point
count).  Everything is float64 and bitwise deterministic given (problem,
variant, seed, config).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from pinnjet.errors import ConfigurationError, NumericError, ShapeError
from pinnjet.networks import (
    from_flat,
    init_params,
    input_jet,
    param_count,
    to_flat,
)
from pinnjet.problems import (
    ProblemSpec,
    default_network_config,
    get_problem,
    residual_burgers,
    residual_cavity,
    residual_helmholtz,
    residual_klein_gordon,
)
from pinnjet.rngs import STREAM_PCGRAD, stream_generator
from pinnjet.sampling import CollocationSet, collocation_hash, sample_problem_points
from pinnjet.tape import Tape, backward, take_row
from pinnjet.networks import forward

VARIANTS = ("std", "lda", "gc", "acr")
VARIANT_ARCH = {"std": "mlp", "gc": "mlp", "lda": "lda", "acr": "lda"}
VARIANT_COMBINER = {"std": "sum", "lda": "sum", "gc": "pcgrad", "acr": "pcgrad"}


@dataclass
class TrainingConfig:
    variant: str = "std"
    iterations: int = 40000
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    lambda_pde: float = 1.0
    lambda_ic: float = 1.0
    lambda_bc: float = 1.0
    log_every: int = 100

    def __post_init__(self):
        self.variant = self.variant.lower()
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                f"unknown variant {self.variant!r}; choose from {', '.join(VARIANTS)}"
            )
        if self.iterations < 0:
            raise ConfigurationError("iterations must be >= 0")

    @property
    def architecture(self) -> str:
        return VARIANT_ARCH[self.variant]

    @property
    def combiner(self) -> str:
        return VARIANT_COMBINER[self.variant]

    def task_weight(self, task: str) -> float:
        if task == "pde":
            return self.lambda_pde
        if task == "ic":
            return self.lambda_ic
        return self.lambda_bc


@dataclass
class TaskGradients:
    names: tuple
    losses: dict
    grads: dict

    @property
    def g_pde(self):
        return self.grads.get("pde")

    @property
    def g_ic(self):
        return self.grads.get("ic")

    @property
    def g_bc(self):
        return self.grads.get("bc")

    def ordered_grads(self) -> list:
        return [self.grads[n] for n in self.names]


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


@dataclass
class RunReport:
    problem: str
    variant: str
    seed: int
    iterations: int
    rel_l2: float | None = None
    rel_linf: float | None = None
    final_losses: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    params_flat: np.ndarray | None = None
    points_hash: str = ""
    wall_time: float = 0.0
    aborted: bool = False
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "variant": self.variant,
            "seed": self.seed,
            "iterations": self.iterations,
            "rel_l2": self.rel_l2,
            "rel_linf": self.rel_linf,
            "final_losses": self.final_losses,
            "points_hash": self.points_hash,
            "wall_time": self.wall_time,
            "aborted": self.aborted,
            "error": self.error,
        }


# ---------------------------------------------------------------------------
# Task evaluation.
# ---------------------------------------------------------------------------

class _RunContext:
    """Precomputed per-run inputs: seeded jets and condition target groups."""

    def __init__(self, problem: ProblemSpec, points: CollocationSet):
        self.problem = problem
        self.points = points
        order = problem.order
        self.x_pde = input_jet(points.interior, order)
        # group condition batches that share a point set so the network runs
        # once per distinct point set
        self.cond_groups = {}
        for task, batches in points.conditions.items():
            groups = []
            for b in batches:
                for g in groups:
                    if g[0].shape == b.points.shape and np.array_equal(g[0], b.points):
                        g[2].append(b)
                        break
                else:
                    groups.append((b.points, input_jet(b.points, order), [b]))
            self.cond_groups[task] = groups

    def task_names(self) -> tuple:
        return self.problem.tasks


def _component_var(out, component: str):
    """Extract the conditioned scalar quantity from the network output jets."""
    if component == "value":
        return take_row(out, 0).d((0, 0))
    if component == "t_derivative":
        return take_row(out, 0).d((0, 1))
    if component == "u":        # u = psi_y
        return take_row(out, 0).d((0, 1))
    if component == "v":        # v = -psi_x
        return -take_row(out, 0).d((1, 0))
    if component == "p":
        return take_row(out, 1).d((0, 0))
    raise ConfigurationError(f"unknown condition component {component!r}")


def _pde_loss_var(tape: Tape, params, ctx: _RunContext):
    problem = ctx.problem
    out = forward(params, ctx.x_pde, tape)
    n = ctx.points.task_points["pde"]
    c = problem.constants
    if problem.name == "burgers":
        r = residual_burgers(take_row(out, 0), c["nu"])
        return r.sum_sq() * (1.0 / n)
    if problem.name.startswith("helmholtz"):
        r = residual_helmholtz(take_row(out, 0), ctx.points.interior,
                               c["k"], c["a1"], c["a2"])
        return r.sum_sq() * (1.0 / n)
    if problem.name == "klein_gordon":
        r = residual_klein_gordon(take_row(out, 0), ctx.points.interior,
                                  c["alpha"], c["beta"], c["gamma"],
                                  int(c["exponent"]))
        return r.sum_sq() * (1.0 / n)
    if problem.name == "cavity":
        rx, ry = residual_cavity(take_row(out, 0), take_row(out, 1), c["re"])
        return (rx.sum_sq() + ry.sum_sq()) * (1.0 / n)
    raise ConfigurationError(f"unknown problem {problem.name!r}")


def _condition_loss_var(tape: Tape, params, ctx: _RunContext, task: str):
    total = None
    for _, xjet, batches in ctx.cond_groups[task]:
        out = forward(params, xjet, tape)
        for b in batches:
            dev = _component_var(out, b.component) - b.values
            sq = dev.sum_sq()
            total = sq if total is None else total + sq
    return total * (1.0 / ctx.points.task_points[task])


def _task_loss_var(tape: Tape, params, ctx: _RunContext, task: str):
    if task == "pde":
        return _pde_loss_var(tape, params, ctx)
    return _condition_loss_var(tape, params, ctx, task)


def task_losses(params, problem: ProblemSpec, points: CollocationSet,
                _ctx: _RunContext | None = None) -> dict:
    """Loss value per task at the given parameters (no gradients)."""
    ctx = _ctx or _RunContext(problem, points)
    out = {}
    for task in ctx.task_names():
        loss = _task_loss_var(Tape(), params, ctx, task)
        val = float(loss.jet.coeffs[0])
        if not np.isfinite(val):
            raise NumericError(f"non-finite {task} loss")
        out[task] = val
    return out


def task_gradients(params, problem: ProblemSpec, points: CollocationSet,
                   _ctx: _RunContext | None = None) -> TaskGradients:
    """Per-task losses and parameter gradients (one tape per task)."""
    ctx = _ctx or _RunContext(problem, points)
    n_params = to_flat(params).size
    losses = {}
    grads = {}
    for task in ctx.task_names():
        tape = Tape()
        loss = _task_loss_var(tape, params, ctx, task)
        losses[task] = float(loss.jet.coeffs[0])
        grads[task] = backward(tape, loss, n_params)
    return TaskGradients(ctx.task_names(), losses, grads)


# ---------------------------------------------------------------------------
# Gradient combining.
# ---------------------------------------------------------------------------

def pcgrad_resolve(grads, rng) -> np.ndarray:
    """Conflict-resolved sum of task gradients.

    Each task's working copy is projected off the original gradient of every
    task it conflicts with (negative dot product), visiting the other tasks
    in a fresh random order per task; the resolved copies are summed.
    Projections always use the original gradients, and a projection can only
    shrink the working copy.
    """
    if isinstance(grads, TaskGradients):
        grads = grads.ordered_grads()
    gs = [np.asarray(g, dtype=np.float64) for g in grads]
    k = len(gs)
    if k < 2:
        raise ConfigurationError("conflict resolution needs at least two tasks")
    length = gs[0].size
    if any(g.shape != (length,) for g in gs):
        raise ShapeError("task gradients must share one flat length")
    norms_sq = [float(g @ g) for g in gs]
    out = np.zeros(length)
    for i in range(k):
        gt = gs[i].copy()
        order = rng.permutation(k)
        for j in order:
            if j == i:
                continue
            dot = float(gt @ gs[j])
            if dot < 0.0:
                gt -= (dot / norms_sq[j]) * gs[j]
        out += gt
    return out


def _weighted_sum(tg: TaskGradients, config: TrainingConfig) -> np.ndarray:
    out = np.zeros_like(tg.grads[tg.names[0]])
    for task in tg.names:
        out += config.task_weight(task) * tg.grads[task]
    return out


# ---------------------------------------------------------------------------
# Adam.
# ---------------------------------------------------------------------------

def adam_step(state: AdamState, flat: np.ndarray, grad: np.ndarray,
              config: TrainingConfig) -> None:
    """One bias-corrected Adam update, in place on the flat parameter vector."""
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != flat.shape:
        raise ShapeError("gradient/parameter length mismatch")
    if not np.all(np.isfinite(grad)):
        raise NumericError("step refused: non-finite gradient entries")
    state.t += 1
    b1, b2 = config.beta1, config.beta2
    state.m *= b1
    state.m += (1.0 - b1) * grad
    state.v *= b2
    state.v += (1.0 - b2) * grad * grad
    m_hat = state.m / (1.0 - b1 ** state.t)
    v_hat = state.v / (1.0 - b2 ** state.t)
    flat -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.eps)


# ---------------------------------------------------------------------------
# Training loop.
# ---------------------------------------------------------------------------

_CANONICAL_TASKS = ("pde", "ic", "bc")


def _trace_record(iteration: int, losses: dict, rel_l2, rel_linf) -> dict:
    rec = {"iteration": iteration}
    rec["L_pde"] = losses.get("pde")
    rec["L_ic"] = losses.get("ic")
    if "bc" in losses:
        rec["L_bc"] = losses["bc"]
    elif "bc_lid" in losses:
        rec["L_bc"] = losses["bc_lid"] + losses["bc_walls"]
    else:
        rec["L_bc"] = None
    rec["rel_l2"] = rel_l2
    rec["rel_linf"] = rel_linf
    if set(losses) - set(_CANONICAL_TASKS):
        rec["task_losses"] = dict(losses)
    return rec


def train_single(problem: ProblemSpec | str, config: TrainingConfig, seed: int,
                 points: CollocationSet | None = None,
                 net_config=None, trace_path=None,
                 eval_resolution=None) -> RunReport:
    """Train one (problem, variant, seed) run to completion.

    Returns a RunReport with the final flat parameter vector, the
    convergence trace (a row at iteration 0 and every log_every iterations,
    all describing the current parameters), and final grid error metrics.
    Numeric failure aborts the run and is recorded on the report.
    """
    from pinnjet.metrics import evaluate_on_grid

    if isinstance(problem, str):
        problem = get_problem(problem)
    if points is None:
        points = sample_problem_points(problem, seed)
    if net_config is None:
        net_config = default_network_config(problem, config.architecture)
    elif net_config.architecture != config.architecture:
        raise ConfigurationError(
            f"variant {config.variant!r} requires architecture "
            f"{config.architecture!r}, got {net_config.architecture!r}"
        )

    t_start = time.time()
    n_params = param_count(net_config)
    flat = to_flat(init_params(net_config, seed))
    params = from_flat(net_config, flat)   # structured views over flat
    ctx = _RunContext(problem, points)
    adam = AdamState.zeros(n_params)
    pc_rng = (stream_generator(seed, STREAM_PCGRAD)
              if config.combiner == "pcgrad" else None)

    report = RunReport(problem.name, config.variant, seed, config.iterations,
                       points_hash=collocation_hash(points))
    trace_fh = open(trace_path, "w") if trace_path else None

    def emit(iteration: int):
        losses = task_losses(params, problem, points, _ctx=ctx)
        ev = evaluate_on_grid(params, problem, eval_resolution)
        rec = _trace_record(iteration, losses, ev.rel_l2, ev.rel_linf)
        report.trace.append(rec)
        if trace_fh:
            trace_fh.write(json.dumps(rec) + "\n")
            trace_fh.flush()
        return losses, ev

    try:
        last = emit(0)
        for it in range(1, config.iterations + 1):
            tg = task_gradients(params, problem, points, _ctx=ctx)
            if config.combiner == "pcgrad":
                combined = pcgrad_resolve(tg, pc_rng)
            else:
                combined = _weighted_sum(tg, config)
            adam_step(adam, flat, combined, config)
            if it % config.log_every == 0 or it == config.iterations:
                last = emit(it)
        final_losses, final_ev = last
        report.final_losses = final_losses
        report.rel_l2 = final_ev.rel_l2
        report.rel_linf = final_ev.rel_linf
    except (NumericError, FloatingPointError) as exc:
        report.aborted = True
        report.error = str(exc)
    finally:
        if trace_fh:
            trace_fh.close()
    report.params_flat = flat
    report.wall_time = time.time() - t_start
    return report


def train(variant: str, problem: ProblemSpec | str, seeds, config:
          TrainingConfig | None = None, **kwargs) -> list:
    """Train one variant over several seeds; failures abort only their seed."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    if config is None:
        config = TrainingConfig(variant=variant)
    elif config.variant != variant.lower():
        raise ConfigurationError("config.variant disagrees with variant argument")
    return [train_single(problem, config, s, **kwargs) for s in seeds]
