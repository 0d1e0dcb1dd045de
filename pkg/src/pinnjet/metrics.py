"""Error metrics, grid evaluation, slicing, and multi-seed aggregation.

Errors are computed on uniform evaluation grids over the full domain, never
on training points.  Burgers/Helmholtz/Klein-Gordon compare the network's
scalar output against the exact field; the cavity compares the velocity
magnitude derived from the streamfunction output against the reference
finite-difference field, node-for-node on the reference grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from pinnjet.errors import DomainError, MetricError, ShapeError, UsageError
from pinnjet.jets import jet_space
from pinnjet.networks import forward, input_jet
from pinnjet.problems import ProblemSpec, exact_solution

DEFAULT_RESOLUTION = {
    "burgers": (256, 100),       # (nx, nt)
    "helmholtz14": (256, 256),
    "helmholtz44": (256, 256),
    "klein_gordon": (256, 256),
    "cavity": None,              # matched to the reference oracle grid
}


def relative_l2(pred, exact) -> float:
    """||pred - exact||_2 / ||exact||_2 over flattened fields."""
    pred = np.asarray(pred, dtype=np.float64).ravel()
    exact = np.asarray(exact, dtype=np.float64).ravel()
    if pred.shape != exact.shape or pred.size == 0:
        raise ShapeError("relative_l2 needs equal-length nonempty arrays")
    denom = float(np.linalg.norm(exact))
    if denom == 0.0:
        raise MetricError("relative_l2 undefined for a zero exact field")
    return float(np.linalg.norm(pred - exact) / denom)


def relative_linf(pred, exact) -> float:
    """max|pred - exact| / max|exact|."""
    pred = np.asarray(pred, dtype=np.float64).ravel()
    exact = np.asarray(exact, dtype=np.float64).ravel()
    if pred.shape != exact.shape or pred.size == 0:
        raise ShapeError("relative_linf needs equal-length nonempty arrays")
    denom = float(np.max(np.abs(exact)))
    if denom == 0.0:
        raise MetricError("relative_linf undefined for a zero exact field")
    return float(np.max(np.abs(pred - exact)) / denom)


@dataclass
class EvalResult:
    problem: str
    axis_names: tuple          # e.g. ("x", "t") or ("x", "y")
    ax0: np.ndarray            # first variable grid (n0,)
    ax1: np.ndarray            # second variable grid (n1,)
    pred: np.ndarray           # (n1, n0): rows follow the second variable
    exact: np.ndarray
    abs_err: np.ndarray
    rel_l2: float
    rel_linf: float


_exact_grid_cache: dict = {}


def _exact_grid(problem: ProblemSpec, ax0, ax1):
    key = (problem.name, tuple(sorted(problem.constants.items())),
           ax0.size, ax1.size, float(ax0[0]), float(ax0[-1]),
           float(ax1[0]), float(ax1[-1]))
    if key not in _exact_grid_cache:
        if problem.name == "cavity":
            from pinnjet.oracles import cavity_reference
            fld = cavity_reference(problem.constants["re"], ax0.size)
            _exact_grid_cache[key] = np.hypot(fld.u, fld.v)
        else:
            a0, a1 = np.meshgrid(ax0, ax1)   # (n1, n0)
            pts = np.column_stack([a0.ravel(), a1.ravel()])
            _exact_grid_cache[key] = exact_solution(problem, pts).reshape(a0.shape)
    return _exact_grid_cache[key]


def _predict(params, problem: ProblemSpec, pts: np.ndarray) -> np.ndarray:
    """Network prediction of the compared field at (n, 2) points."""
    chunk = 16384
    out = np.empty(pts.shape[0])
    sp = jet_space(2, 1)
    iu = sp.index[(0, 1)]
    iv = sp.index[(1, 0)]
    for lo in range(0, pts.shape[0], chunk):
        sl = pts[lo:lo + chunk]
        jets = forward(params, input_jet(sl, 1)).jet.coeffs
        if problem.name == "cavity":
            u = jets[0, :, iu]
            v = -jets[0, :, iv]
            out[lo:lo + chunk] = np.hypot(u, v)
        else:
            out[lo:lo + chunk] = jets[0, :, 0]
    return out


def evaluate_on_grid(params, problem: ProblemSpec,
                     resolution: tuple | None = None) -> EvalResult:
    """Prediction, exact field, and error metrics on a uniform tensor grid."""
    if resolution is None:
        resolution = DEFAULT_RESOLUTION[problem.name]
    if problem.name == "cavity":
        from pinnjet.oracles import cavity_reference
        grid_n = resolution[0] if resolution else 129
        fld = cavity_reference(problem.constants["re"], grid_n)
        ax0, ax1 = fld.x, fld.y
        names = ("x", "y")
    else:
        (lo0, hi0), (lo1, hi1) = problem.bounds
        n0, n1 = resolution
        ax0 = np.linspace(lo0, hi0, n0)
        ax1 = np.linspace(lo1, hi1, n1)
        names = ("x", "t") if problem.name in ("burgers", "klein_gordon") else ("x", "y")
    a0, a1 = np.meshgrid(ax0, ax1)
    pts = np.column_stack([a0.ravel(), a1.ravel()])
    pred = _predict(params, problem, pts).reshape(a0.shape)
    exact = _exact_grid(problem, ax0, ax1)
    abs_err = np.abs(pred - exact)
    return EvalResult(problem.name, names, ax0, ax1, pred, exact, abs_err,
                      relative_l2(pred, exact), relative_linf(pred, exact))


@dataclass
class SliceProfile:
    axis: str
    value: float            # grid line actually used
    coord: np.ndarray       # the free variable
    pred: np.ndarray
    exact: np.ndarray
    abs_err: np.ndarray


def slice_extract(result: EvalResult, axis: str, value: float) -> SliceProfile:
    """Nearest-grid-line 1-D profile of pred/exact/|error|."""
    if axis not in result.axis_names:
        raise DomainError(f"axis {axis!r} not in {result.axis_names}")
    k = result.axis_names.index(axis)
    grid = (result.ax0, result.ax1)[k]
    if value < grid.min() - 1e-12 or value > grid.max() + 1e-12:
        raise DomainError(f"slice value {value} outside [{grid.min()}, {grid.max()}]")
    idx = int(np.argmin(np.abs(grid - value)))
    if k == 0:
        take = (slice(None), idx)
        coord = result.ax1
    else:
        take = (idx, slice(None))
        coord = result.ax0
    return SliceProfile(axis, float(grid[idx]), coord,
                        result.pred[take], result.exact[take],
                        result.abs_err[take])


@dataclass
class ErrorSummary:
    per_seed: list                  # [(seed, rel_l2, rel_linf), ...]
    rel_l2_mean: float
    rel_l2_std: float
    rel_linf_mean: float
    rel_linf_std: float
    single_run: bool = False


def aggregate_runs(reports) -> ErrorSummary:
    """Mean and sample standard deviation of errors across seeds."""
    reports = list(reports)
    if not reports:
        raise UsageError("aggregate_runs needs at least one run")
    for r in reports:
        if r.rel_l2 is None or r.rel_linf is None:
            raise UsageError(f"run (seed {r.seed}) has no metrics (aborted?)")
    l2 = np.array([r.rel_l2 for r in reports])
    li = np.array([r.rel_linf for r in reports])
    single = len(reports) == 1
    return ErrorSummary(
        per_seed=[(r.seed, r.rel_l2, r.rel_linf) for r in reports],
        rel_l2_mean=float(l2.mean()),
        rel_l2_std=0.0 if single else float(l2.std(ddof=1)),
        rel_linf_mean=float(li.mean()),
        rel_linf_std=0.0 if single else float(li.std(ddof=1)),
        single_run=single,
    )


# ---------------------------------------------------------------------------
# Report files.  Floats are written with repr so re-parsing is bit-exact.
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    return repr(float(v))


def write_heatmap_csv(path, result: EvalResult) -> None:
    n0, n1 = result.ax0.size, result.ax1.size
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([result.axis_names[0], result.axis_names[1],
                    "pred", "exact", "abs_err"])
        for j in range(n1):
            for i in range(n0):
                w.writerow([_fmt(result.ax0[i]), _fmt(result.ax1[j]),
                            _fmt(result.pred[j, i]), _fmt(result.exact[j, i]),
                            _fmt(result.abs_err[j, i])])


def write_slice_csv(path, profile: SliceProfile) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["coord", "pred", "exact", "abs_err"])
        for i in range(profile.coord.size):
            w.writerow([_fmt(profile.coord[i]), _fmt(profile.pred[i]),
                        _fmt(profile.exact[i]), _fmt(profile.abs_err[i])])


def write_summary_csv(path, rows) -> None:
    """Summary table: one row per model variant."""
    cols = ["model", "iterations", "rel_l2_mean", "rel_l2_std",
            "rel_linf_mean", "rel_linf_std"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([row["model"], row["iterations"],
                        _fmt(row["rel_l2_mean"]), _fmt(row["rel_l2_std"]),
                        _fmt(row["rel_linf_mean"]), _fmt(row["rel_linf_std"])])
