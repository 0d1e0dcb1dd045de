"""Training point generation: LHS interior collocation plus condition points.

All randomness comes from the sampling stream of the run seed, so point
sets depend only on (problem, seed) and are shared verbatim across model
variants.  Draw order is fixed and documented: interior LHS first, then
condition manifolds in the order listed per problem below.

    burgers       ic x (100), bc t (100: first 50 at x=-1, rest at x=+1)
    helmholtz*    bc: 100 points per edge in order x=-1, x=+1, y=-1, y=+1
    klein_gordon  ic x (200), bc t (200: first 100 at x=0, rest at x=1)
    cavity        lid x (300), then left y, right y, bottom x (100 each)

Condition points are uniform on their manifolds; boundary/initial points
are constructed exactly on the manifold, never projected.  Target values
are attached through the problem's condition_targets operator and grouped
into per-component batches per training task.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from pinnjet.errors import ConfigurationError
from pinnjet.problems import ProblemSpec, condition_targets, get_problem
from pinnjet.rngs import STREAM_SAMPLING, stream_generator


@dataclass
class ConditionBatch:
    points: np.ndarray     # (n, d)
    values: np.ndarray     # (n,)
    kind: str              # initial | initial_velocity | boundary
    component: str         # value | t_derivative | u | v | p


@dataclass
class CollocationSet:
    problem: str
    seed: int
    interior: np.ndarray                    # (N_f, d)
    conditions: dict = field(default_factory=dict)   # task -> [ConditionBatch]
    task_points: dict = field(default_factory=dict)  # task -> distinct points

    @property
    def initial(self) -> np.ndarray:
        batches = self.conditions.get("ic", [])
        return batches[0].points if batches else np.empty((0, self.interior.shape[1]))

    @property
    def boundary(self) -> np.ndarray:
        if "bc" in self.conditions:
            return self.conditions["bc"][0].points
        parts = []
        for task in ("bc_lid", "bc_walls"):
            for b in self.conditions.get(task, []):
                if b.component == "u":   # u/v/p batches share points
                    parts.append(b.points)
        return np.concatenate(parts) if parts else np.empty((0, self.interior.shape[1]))


def lhs_sample(n: int, dims: int, bounds, seed: int) -> np.ndarray:
    """Latin Hypercube sample of n points in the given box.

    Per dimension the range splits into n equal strata; each stratum gets
    exactly one point, placed uniformly within it, and strata are assigned
    to points by an independent random permutation per dimension.
    """
    gen = stream_generator(seed, STREAM_SAMPLING)
    return _lhs_with_gen(n, dims, bounds, gen)


def _lhs_with_gen(n: int, dims: int, bounds, gen) -> np.ndarray:
    if n < 1:
        raise ConfigurationError("lhs_sample needs n >= 1")
    bounds = tuple(tuple(map(float, b)) for b in bounds)
    if len(bounds) != dims:
        raise ConfigurationError("bounds must list one (lo, hi) pair per dimension")
    out = np.empty((n, dims))
    for j, (lo, hi) in enumerate(bounds):
        if not lo < hi:
            raise ConfigurationError(f"degenerate bounds ({lo}, {hi})")
        strata = gen.permutation(n)
        offs = gen.uniform(0.0, 1.0, n)
        out[:, j] = lo + (strata + offs) / n * (hi - lo)
    return out


def _batches_from_targets(targets, d: int) -> dict:
    """Group ConditionTargets into per-(kind, component) batches, stably."""
    groups = {}
    order = []
    for tg in targets:
        key = (tg.kind, tg.component)
        if key not in groups:
            groups[key] = ([], [])
            order.append(key)
        groups[key][0].append(tg.point)
        groups[key][1].append(tg.value)
    out = []
    for key in order:
        pts, vals = groups[key]
        out.append(ConditionBatch(np.array(pts, dtype=np.float64).reshape(-1, d),
                                  np.array(vals, dtype=np.float64), *key))
    return out


def sample_problem_points(problem: ProblemSpec | str, seed: int) -> CollocationSet:
    """All training points for a problem, deterministic in the seed."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    gen = stream_generator(seed, STREAM_SAMPLING)
    d = problem.input_dim
    interior = _lhs_with_gen(problem.n_interior, d, problem.bounds, gen)
    cs = CollocationSet(problem.name, seed, interior)

    def add(task, points):
        batches = _batches_from_targets(condition_targets(problem, points), d)
        cs.conditions.setdefault(task, []).extend(batches)
        cs.task_points[task] = cs.task_points.get(task, 0) + len(points)

    (xlo, xhi), (ylo, yhi) = problem.bounds
    if problem.name == "burgers" or problem.name == "klein_gordon":
        xs = gen.uniform(xlo, xhi, problem.n_initial)
        add("ic", np.column_stack([xs, np.full_like(xs, ylo)]))
        ts = gen.uniform(ylo, yhi, problem.n_boundary)
        half = problem.n_boundary // 2
        pts = np.column_stack([np.where(np.arange(ts.size) < half, xlo, xhi), ts])
        add("bc", pts)
    elif problem.name.startswith("helmholtz"):
        per_edge = problem.n_boundary // 4
        walls = []
        for fixed, axis in ((xlo, 0), (xhi, 0), (ylo, 1), (yhi, 1)):
            lo, hi = problem.bounds[1 - axis]
            free = gen.uniform(lo, hi, per_edge)
            pts = np.empty((per_edge, 2))
            pts[:, axis] = fixed
            pts[:, 1 - axis] = free
            walls.append(pts)
        add("bc", np.concatenate(walls))
    elif problem.name == "cavity":
        counts = problem.boundary_counts
        lid_x = gen.uniform(xlo, xhi, counts["lid"])
        add("bc_lid", np.column_stack([lid_x, np.full_like(lid_x, yhi)]))
        left_y = gen.uniform(ylo, yhi, counts["left"])
        right_y = gen.uniform(ylo, yhi, counts["right"])
        bot_x = gen.uniform(xlo, xhi, counts["bottom"])
        walls = np.concatenate([
            np.column_stack([np.full_like(left_y, xlo), left_y]),
            np.column_stack([np.full_like(right_y, xhi), right_y]),
            np.column_stack([bot_x, np.full_like(bot_x, ylo)]),
        ])
        add("bc_walls", walls)
        # pressure gauge at the origin corner enters as one extra target
        anchor = [t for t in condition_targets(problem, [(0.0, 0.0)])
                  if t.component == "p"]
        cs.conditions["bc_walls"].extend(_batches_from_targets(anchor, d))
        cs.task_points["bc_walls"] += 1
    else:
        raise ConfigurationError(f"unknown problem {problem.name!r}")
    cs.task_points["pde"] = problem.n_interior
    return cs


# ---------------------------------------------------------------------------
# Serialization and identity.
# ---------------------------------------------------------------------------

def collocation_hash(cs: CollocationSet) -> str:
    """SHA-256 over the raw point/target bytes in documented order."""
    hsh = hashlib.sha256()
    hsh.update(cs.problem.encode())
    hsh.update(np.ascontiguousarray(cs.interior).tobytes())
    for task in sorted(cs.conditions):
        hsh.update(task.encode())
        for b in cs.conditions[task]:
            hsh.update(b.kind.encode())
            hsh.update(b.component.encode())
            hsh.update(np.ascontiguousarray(b.points).tobytes())
            hsh.update(np.ascontiguousarray(b.values).tobytes())
    return hsh.hexdigest()


def save_collocation(cs: CollocationSet, path) -> None:
    doc = {
        "format": "pinnjet-points-v1",
        "problem": cs.problem,
        "seed": cs.seed,
        "interior": cs.interior.tolist(),
        "task_points": cs.task_points,
        "conditions": {
            task: [{"kind": b.kind, "component": b.component,
                    "points": b.points.tolist(), "values": b.values.tolist()}
                   for b in batches]
            for task, batches in cs.conditions.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_collocation(path) -> CollocationSet:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "pinnjet-points-v1":
        raise ConfigurationError(f"unrecognized point-set format in {path}")
    cs = CollocationSet(doc["problem"], doc["seed"],
                        np.array(doc["interior"], dtype=np.float64))
    cs.task_points = {k: int(v) for k, v in doc["task_points"].items()}
    for task, batches in doc["conditions"].items():
        cs.conditions[task] = [
            ConditionBatch(np.array(b["points"], dtype=np.float64),
                           np.array(b["values"], dtype=np.float64),
                           b["kind"], b["component"])
            for b in batches
        ]
    return cs
