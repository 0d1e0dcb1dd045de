"""Grid evaluation, error metrics, slicing, aggregation, and CSV formats."""

import csv
import math
from types import SimpleNamespace

import numpy as np
import pytest

from pinnjet.errors import DomainError, MetricError, ShapeError, UsageError
from pinnjet.metrics import (DEFAULT_RESOLUTION, aggregate_runs,
                             evaluate_on_grid, relative_l2, relative_linf,
                             slice_extract, write_heatmap_csv,
                             write_slice_csv, write_summary_csv)
from pinnjet.networks import NetworkConfig, init_params
from pinnjet.problems import exact_solution, get_problem


def test_relative_errors_hand_values():
    assert relative_l2([1.0, 2.0], [1.0, 1.0]) == pytest.approx(1 / math.sqrt(2))
    assert relative_linf([1.0, 2.0], [1.0, 1.0]) == pytest.approx(1.0)
    assert relative_l2([1.0, 1.0], [1.0, 1.0]) == 0.0


def test_relative_errors_reject_bad_input():
    with pytest.raises(ShapeError):
        relative_l2([1.0], [1.0, 2.0])
    with pytest.raises(ShapeError):
        relative_linf([], [])
    with pytest.raises(MetricError):
        relative_l2([1.0], [0.0])
    with pytest.raises(MetricError):
        relative_linf([1.0, 2.0], [0.0, 0.0])


def _report(seed, l2, linf):
    return SimpleNamespace(seed=seed, rel_l2=l2, rel_linf=linf)


def test_aggregate_runs_hand_values():
    runs = [_report(1, 0.1, 0.2), _report(2, 0.2, 0.2), _report(3, 0.4, 0.2)]
    s = aggregate_runs(runs)
    assert s.rel_l2_mean == pytest.approx(7 / 30)
    # sample std: deviations (-4, -1, 5)/30, sum of squares 42/900, ddof=1
    assert s.rel_l2_std == pytest.approx(math.sqrt(7 / 300))
    assert s.rel_linf_mean == pytest.approx(0.2)
    assert s.rel_linf_std == pytest.approx(0.0)
    assert s.per_seed == [(1, 0.1, 0.2), (2, 0.2, 0.2), (3, 0.4, 0.2)]
    assert not s.single_run


def test_aggregate_single_run_flags_itself():
    s = aggregate_runs([_report(7, 0.3, 0.5)])
    assert s.single_run
    assert s.rel_l2_std == 0.0 and s.rel_linf_std == 0.0
    assert s.rel_l2_mean == 0.3


def test_aggregate_rejects_empty_and_aborted():
    with pytest.raises(UsageError):
        aggregate_runs([])
    with pytest.raises(UsageError):
        aggregate_runs([_report(1, None, None)])


# ---------------------------------------------------------------------------
# Grid evaluation.
# ---------------------------------------------------------------------------

NET = NetworkConfig(2, (8, 8), 1, "mlp")


@pytest.fixture(scope="module")
def burgers_eval():
    params = init_params(NET, 3)
    problem = get_problem("burgers")
    return evaluate_on_grid(params, problem, (12, 7)), problem


def test_evaluate_shapes_and_axes(burgers_eval):
    res, problem = burgers_eval
    assert res.problem == "burgers"
    assert res.axis_names == ("x", "t")
    assert res.ax0.shape == (12,) and res.ax1.shape == (7,)
    assert res.pred.shape == (7, 12)          # rows follow the second axis
    assert res.ax0[0] == problem.bounds[0][0]
    assert res.ax0[-1] == problem.bounds[0][1]
    assert res.ax1[0] == problem.bounds[1][0]
    assert res.ax1[-1] == problem.bounds[1][1]


def test_evaluate_metrics_self_consistent(burgers_eval):
    res, _ = burgers_eval
    assert np.array_equal(res.abs_err, np.abs(res.pred - res.exact))
    assert res.rel_l2 == relative_l2(res.pred, res.exact)
    assert res.rel_linf == relative_linf(res.pred, res.exact)


def test_evaluate_exact_field_spot_check(burgers_eval):
    res, problem = burgers_eval
    i, j = 5, 2
    pt = np.array([[res.ax0[i], res.ax1[j]]])
    assert res.exact[j, i] == pytest.approx(exact_solution(problem, pt)[0],
                                            rel=1e-12)


def test_default_resolutions():
    assert DEFAULT_RESOLUTION["burgers"] == (256, 100)
    assert DEFAULT_RESOLUTION["helmholtz14"] == (256, 256)
    assert DEFAULT_RESOLUTION["cavity"] is None


def test_evaluate_cavity_uses_reference_grid():
    params = init_params(NetworkConfig(2, (6, 6), 2, "mlp"), 1)
    res = evaluate_on_grid(params, get_problem("cavity"), (33,))
    assert res.axis_names == ("x", "y")
    assert res.pred.shape == (33, 33)
    # speeds are nonnegative on both sides of the comparison
    assert np.all(res.pred >= 0) and np.all(res.exact >= 0)
    assert np.isfinite(res.rel_l2) and np.isfinite(res.rel_linf)


# ---------------------------------------------------------------------------
# Slices.
# ---------------------------------------------------------------------------

def test_slice_nearest_line(burgers_eval):
    res, _ = burgers_eval
    # t grid is linspace(0, 0.99, 7); ask for 0.5 and get the nearest line
    prof = slice_extract(res, "t", 0.5)
    j = int(np.argmin(np.abs(res.ax1 - 0.5)))
    assert prof.value == res.ax1[j]
    assert np.array_equal(prof.pred, res.pred[j, :])
    assert np.array_equal(prof.coord, res.ax0)


def test_slice_along_first_axis(burgers_eval):
    res, _ = burgers_eval
    prof = slice_extract(res, "x", res.ax0[4])
    assert prof.value == res.ax0[4]
    assert np.array_equal(prof.pred, res.pred[:, 4])
    assert np.array_equal(prof.coord, res.ax1)
    assert np.array_equal(prof.abs_err, res.abs_err[:, 4])


def test_slice_rejects_bad_requests(burgers_eval):
    res, _ = burgers_eval
    with pytest.raises(DomainError):
        slice_extract(res, "y", 0.5)
    with pytest.raises(DomainError):
        slice_extract(res, "t", 2.5)


# ---------------------------------------------------------------------------
# CSV formats.  Floats are repr'd, so parsing them back is bit-exact.
# ---------------------------------------------------------------------------

def test_heatmap_csv_layout(tmp_path, burgers_eval):
    res, _ = burgers_eval
    path = tmp_path / "heatmap.csv"
    write_heatmap_csv(path, res)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "t", "pred", "exact", "abs_err"]
    assert len(rows) == 1 + res.ax0.size * res.ax1.size
    # j-major: the first axis varies fastest
    assert float(rows[1][0]) == res.ax0[0] and float(rows[2][0]) == res.ax0[1]
    assert float(rows[1][1]) == res.ax1[0] == float(rows[2][1])
    k = 1 + 3 * res.ax0.size + 5    # row (j=3, i=5)
    assert float(rows[k][2]) == res.pred[3, 5]
    assert float(rows[k][3]) == res.exact[3, 5]
    assert float(rows[k][4]) == res.abs_err[3, 5]


def test_slice_csv_roundtrip(tmp_path, burgers_eval):
    res, _ = burgers_eval
    prof = slice_extract(res, "t", 0.25)
    path = tmp_path / "slice.csv"
    write_slice_csv(path, prof)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["coord", "pred", "exact", "abs_err"]
    assert len(rows) == 1 + prof.coord.size
    got = np.array([[float(c) for c in r] for r in rows[1:]])
    assert np.array_equal(got[:, 0], prof.coord)
    assert np.array_equal(got[:, 1], prof.pred)
    assert np.array_equal(got[:, 3], prof.abs_err)


def test_summary_csv_format(tmp_path):
    rows = [
        dict(model="std", iterations=100, rel_l2_mean=0.125, rel_l2_std=0.5,
             rel_linf_mean=0.25, rel_linf_std=0.0625),
    ]
    path = tmp_path / "summary.csv"
    write_summary_csv(path, rows)
    text = path.read_text().splitlines()
    assert text[0] == ("model,iterations,rel_l2_mean,rel_l2_std,"
                       "rel_linf_mean,rel_linf_std")
    assert text[1] == "std,100,0.125,0.5,0.25,0.0625"
