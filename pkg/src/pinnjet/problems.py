"""Benchmark PDE problems: residual operators, condition targets, exact fields.

Four problems are registered:

    burgers       viscous Burgers on [-1,1]x[0,1], u(x,0) = -sin(pi x)
    helmholtz14   2-D Helmholtz, k=1, forcing mode (a1,a2)=(1,4), zero Dirichlet
    helmholtz44   same with mode (4,4)
    klein_gordon  nonlinear Klein-Gordon with a manufactured solution
    cavity        steady lid-driven cavity at Re=100, streamfunction form

Residual operators are written against the shared jet protocol (value and
derivative extraction plus arithmetic), so the same code runs on plain jets
(pure evaluation) and on tape variables (differentiable for training).
Variable order is (x, t) for time problems and (x, y) for spatial ones, so
a multi-index (i, j) denotes d^(i+j) / dx^i dt^j.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pinnjet.errors import ConfigurationError, DomainError, UsageError
from pinnjet.jets import Jet, seed_point

PROBLEM_NAMES = ("burgers", "helmholtz14", "helmholtz44", "klein_gordon", "cavity")


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    input_dim: int
    output_dim: int
    bounds: tuple          # ((lo, hi), ...) per input variable
    order: int             # jet truncation order the residual needs
    n_interior: int
    n_initial: int
    n_boundary: int
    constants: dict = field(default_factory=dict)
    tasks: tuple = ()
    boundary_counts: dict | None = None   # per-wall split where it matters

    def __post_init__(self):
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ConfigurationError(f"degenerate bounds ({lo}, {hi})")


@dataclass(frozen=True)
class ConditionTarget:
    point: tuple
    value: float
    kind: str              # initial | initial_velocity | boundary
    component: str = "value"   # value | t_derivative | u | v | p


_BASE = {
    "burgers": dict(
        input_dim=2, output_dim=1, bounds=((-1.0, 1.0), (0.0, 1.0)), order=2,
        n_interior=10000, n_initial=100, n_boundary=100,
        constants={"nu": 0.01 / np.pi}, tasks=("pde", "ic", "bc"),
    ),
    "helmholtz14": dict(
        input_dim=2, output_dim=1, bounds=((-1.0, 1.0), (-1.0, 1.0)), order=2,
        n_interior=10000, n_initial=0, n_boundary=400,
        constants={"k": 1.0, "a1": 1.0, "a2": 4.0}, tasks=("pde", "bc"),
    ),
    "helmholtz44": dict(
        input_dim=2, output_dim=1, bounds=((-1.0, 1.0), (-1.0, 1.0)), order=2,
        n_interior=10000, n_initial=0, n_boundary=400,
        constants={"k": 1.0, "a1": 4.0, "a2": 4.0}, tasks=("pde", "bc"),
    ),
    "klein_gordon": dict(
        input_dim=2, output_dim=1, bounds=((0.0, 1.0), (0.0, 1.0)), order=2,
        n_interior=10000, n_initial=200, n_boundary=200,
        constants={"alpha": -1.0, "beta": 0.0, "gamma": 1.0, "exponent": 3},
        tasks=("pde", "ic", "bc"),
    ),
    "cavity": dict(
        input_dim=2, output_dim=2, bounds=((0.0, 1.0), (0.0, 1.0)), order=3,
        n_interior=1000, n_initial=0, n_boundary=600,
        constants={"re": 100.0}, tasks=("pde", "bc_lid", "bc_walls"),
        boundary_counts={"lid": 300, "left": 100, "right": 100, "bottom": 100},
    ),
}

# Hidden widths used by the benchmark protocol; the output layer is implied.
DEFAULT_HIDDEN = {
    "burgers": (20, 20, 20, 20),
    "helmholtz14": (50, 50, 50, 50),
    "helmholtz44": (50, 50, 50, 50),
    "klein_gordon": (50, 50, 50),
    "cavity": (50, 50, 50),
}

DEFAULT_ITERATIONS = {
    "burgers": 40000,
    "helmholtz14": 40000,
    "helmholtz44": 40000,
    "klein_gordon": 40000,
    "cavity": 20000,
}


def get_problem(name: str, **overrides) -> ProblemSpec:
    """Look up a registered problem; keyword overrides patch constants/counts."""
    if name not in _BASE:
        raise ConfigurationError(
            f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}"
        )
    cfg = dict(_BASE[name])
    constants = dict(cfg["constants"])
    for key in list(overrides):
        if key in constants:
            constants[key] = float(overrides.pop(key))
    cfg["constants"] = constants
    for key, val in overrides.items():
        if key not in cfg:
            raise ConfigurationError(f"unknown problem field {key!r}")
        cfg[key] = val
    return ProblemSpec(name=name, **cfg)


def default_network_config(problem: ProblemSpec, architecture: str):
    from pinnjet.networks import NetworkConfig
    return NetworkConfig(
        input_dim=problem.input_dim,
        hidden=DEFAULT_HIDDEN[problem.name],
        output_dim=problem.output_dim,
        architecture=architecture,
    )


def _require_order(u, order: int, what: str = "jet"):
    if u.space.order < order:
        raise ConfigurationError(
            f"{what} has order {u.space.order}, residual needs {order}"
        )


# ---------------------------------------------------------------------------
# Residual operators.
# ---------------------------------------------------------------------------

def residual_burgers(u, nu: float):
    """u_t + u u_x - nu u_xx, from de-normalized jet derivatives."""
    _require_order(u, 2)
    return u.d((0, 1)) + u.d((0, 0)) * u.d((1, 0)) - nu * u.d((2, 0))


def helmholtz_forcing(point: np.ndarray, k: float, a1: float, a2: float):
    """q(x,y) = [-(a1 pi)^2 - (a2 pi)^2 + k^2] sin(a1 pi x) sin(a2 pi y)."""
    point = np.asarray(point, dtype=np.float64)
    x, y = point[..., 0], point[..., 1]
    amp = -((a1 * np.pi) ** 2) - (a2 * np.pi) ** 2 + k ** 2
    return amp * np.sin(a1 * np.pi * x) * np.sin(a2 * np.pi * y)


def residual_helmholtz(u, point, k: float, a1: float, a2: float):
    """u_xx + u_yy + k^2 u - q(x,y)."""
    _require_order(u, 2)
    q = helmholtz_forcing(point, k, a1, a2)
    return u.d((2, 0)) + u.d((0, 2)) + (k * k) * u.d((0, 0)) - q


def klein_gordon_exact(point: np.ndarray):
    """Manufactured solution u(x,t) = x cos(5 pi t) + (x t)^3."""
    point = np.asarray(point, dtype=np.float64)
    x, t = point[..., 0], point[..., 1]
    return x * np.cos(5 * np.pi * t) + (x * t) ** 3


def forcing_klein_gordon(x, t):
    """Forcing for the manufactured Klein-Gordon problem, in closed form.

    f = u_tt - u_xx + u^3 for u = x cos(5 pi t) + (x t)^3:
    f = -25 pi^2 x cos(5 pi t) + 6 x^3 t - 6 x t^3 + (x cos(5 pi t) + x^3 t^3)^3
    """
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    c = np.cos(5 * np.pi * t)
    u = x * c + x ** 3 * t ** 3
    return -25.0 * np.pi ** 2 * x * c + 6.0 * x ** 3 * t - 6.0 * x * t ** 3 + u ** 3


def residual_klein_gordon(u, point, alpha: float = -1.0, beta: float = 0.0,
                          gamma: float = 1.0, exponent: int = 3):
    """u_tt + alpha u_xx + beta u + gamma u^exponent - f(x,t)."""
    _require_order(u, 2)
    point = np.asarray(point, dtype=np.float64)
    f = forcing_klein_gordon(point[..., 0], point[..., 1])
    val = u.d((0, 0))
    return (u.d((0, 2)) + alpha * u.d((2, 0)) + beta * val
            + gamma * val ** exponent - f)


def residual_cavity(psi, p, re: float):
    """Steady momentum residuals (rx, ry) in streamfunction form.

    u = psi_y and v = -psi_x identically satisfy continuity; every velocity
    derivative is read off psi's order-3 coefficients.
    """
    _require_order(psi, 3, "psi")
    _require_order(p, 1, "p")
    u = psi.d((0, 1))
    u_x = psi.d((1, 1))
    u_y = psi.d((0, 2))
    u_xx = psi.d((2, 1))
    u_yy = psi.d((0, 3))
    v = -psi.d((1, 0))
    v_x = -psi.d((2, 0))
    v_y = -psi.d((1, 1))
    v_xx = -psi.d((3, 0))
    v_yy = -psi.d((1, 2))
    inv_re = 1.0 / re
    rx = u * u_x + v * u_y + p.d((1, 0)) - inv_re * (u_xx + u_yy)
    ry = u * v_x + v * v_y + p.d((0, 1)) - inv_re * (v_xx + v_yy)
    return rx, ry


# ---------------------------------------------------------------------------
# Condition targets.
# ---------------------------------------------------------------------------

_MANIFOLD_TOL = 1e-12


def _on(a: float, b: float) -> bool:
    return abs(a - b) <= _MANIFOLD_TOL


def condition_targets(problem: ProblemSpec, points) -> list:
    """Exact target values for initial/boundary points of a problem.

    A point may produce several targets (Klein-Gordon t=0 points carry both
    a value and a velocity target; cavity wall points carry u and v, and the
    corner (0,0) additionally anchors the pressure).  Points that lie on no
    condition manifold raise DomainError.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    out = []
    for pt in pts:
        x, y = pt[0], pt[1]
        key = (float(x), float(y))
        if problem.name == "burgers":
            if _on(y, 0.0):
                out.append(ConditionTarget(key, float(-np.sin(np.pi * x)), "initial"))
            elif _on(x, -1.0) or _on(x, 1.0):
                out.append(ConditionTarget(key, 0.0, "boundary"))
            else:
                raise DomainError(f"point {key} is on no condition manifold")
        elif problem.name.startswith("helmholtz"):
            if _on(abs(x), 1.0) or _on(abs(y), 1.0):
                out.append(ConditionTarget(key, 0.0, "boundary"))
            else:
                raise DomainError(f"point {key} is not on the boundary")
        elif problem.name == "klein_gordon":
            if _on(y, 0.0):
                out.append(ConditionTarget(key, float(x), "initial"))
                out.append(ConditionTarget(key, 0.0, "initial_velocity",
                                           component="t_derivative"))
            elif _on(x, 0.0) or _on(x, 1.0):
                h = float(klein_gordon_exact(pt))
                out.append(ConditionTarget(key, h, "boundary"))
            else:
                raise DomainError(f"point {key} is on no condition manifold")
        elif problem.name == "cavity":
            on_lid = _on(y, 1.0)
            on_wall = _on(x, 0.0) or _on(x, 1.0) or _on(y, 0.0)
            if not (on_lid or on_wall):
                raise DomainError(f"point {key} is not on the boundary")
            u_t = 1.0 if on_lid else 0.0
            out.append(ConditionTarget(key, u_t, "boundary", component="u"))
            out.append(ConditionTarget(key, 0.0, "boundary", component="v"))
            if _on(x, 0.0) and _on(y, 0.0):
                # pressure gauge: p is only defined up to a constant
                out.append(ConditionTarget(key, 0.0, "boundary", component="p"))
        else:
            raise ConfigurationError(f"unknown problem {problem.name!r}")
    return out


# ---------------------------------------------------------------------------
# Exact / reference solutions.
# ---------------------------------------------------------------------------

def _check_domain(problem: ProblemSpec, pts: np.ndarray):
    for j, (lo, hi) in enumerate(problem.bounds):
        v = pts[..., j]
        if np.any(v < lo - _MANIFOLD_TOL) or np.any(v > hi + _MANIFOLD_TOL):
            raise DomainError(f"point outside domain in variable {j}")


def exact_solution(problem: ProblemSpec, point):
    """Exact (or reference) solution values at the given points.

    Helmholtz and Klein-Gordon use their closed forms; Burgers evaluates the
    Cole-Hopf quadrature oracle; cavity interpolates the finite-difference
    reference field bilinearly and returns (u, v) rows.
    """
    pts = np.atleast_2d(np.asarray(point, dtype=np.float64))
    _check_domain(problem, pts)
    if problem.name.startswith("helmholtz"):
        a1, a2 = problem.constants["a1"], problem.constants["a2"]
        return np.sin(a1 * np.pi * pts[..., 0]) * np.sin(a2 * np.pi * pts[..., 1])
    if problem.name == "klein_gordon":
        return klein_gordon_exact(pts)
    if problem.name == "burgers":
        from pinnjet.oracles import burgers_cole_hopf
        return burgers_cole_hopf(pts[..., 0], pts[..., 1], problem.constants["nu"])
    if problem.name == "cavity":
        from pinnjet.oracles import cavity_reference
        field = cavity_reference(problem.constants["re"])
        return field.interp(pts)
    raise ConfigurationError(f"unknown problem {problem.name!r}")


def exact_solution_jet(problem: ProblemSpec, points, order: int | None = None):
    """Analytic solution as a jet at the given points (for residual checks)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    _check_domain(problem, pts)
    if order is None:
        order = problem.order
    if problem.name == "cavity":
        raise UsageError("cavity has no closed-form solution")
    xj, yj = seed_point(pts, order)
    if problem.name.startswith("helmholtz"):
        a1, a2 = problem.constants["a1"], problem.constants["a2"]
        return ((a1 * np.pi) * xj).sin() * ((a2 * np.pi) * yj).sin()
    if problem.name == "klein_gordon":
        return xj * ((5.0 * np.pi) * yj).cos() + (xj * yj) ** 3
    if problem.name == "burgers":
        from pinnjet.oracles import burgers_cole_hopf_jet
        return burgers_cole_hopf_jet(xj, yj, problem.constants["nu"])
    raise ConfigurationError(f"unknown problem {problem.name!r}")
