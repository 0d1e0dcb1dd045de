"""Problem registry, residual operators on exact solutions, condition targets."""

import numpy as np
import pytest

from pinnjet.errors import ConfigurationError, DomainError
from pinnjet.jets import constant, seed_point
from pinnjet.problems import (DEFAULT_HIDDEN, DEFAULT_ITERATIONS,
                              PROBLEM_NAMES, condition_targets,
                              default_network_config, exact_solution,
                              exact_solution_jet, forcing_klein_gordon,
                              get_problem, helmholtz_forcing,
                              klein_gordon_exact, residual_burgers,
                              residual_cavity, residual_helmholtz,
                              residual_klein_gordon)


def test_registry_contents():
    assert PROBLEM_NAMES == ("burgers", "helmholtz14", "helmholtz44",
                             "klein_gordon", "cavity")
    for name in PROBLEM_NAMES:
        p = get_problem(name)
        assert p.name == name
        assert name in DEFAULT_HIDDEN and name in DEFAULT_ITERATIONS
        assert len(p.tasks) >= 2


def test_registry_rejects_unknown():
    with pytest.raises(ConfigurationError):
        get_problem("poisson")
    with pytest.raises(ConfigurationError):
        get_problem("burgers", not_a_field=3)


def test_constant_overrides():
    p = get_problem("burgers", nu=0.1)
    assert p.constants["nu"] == pytest.approx(0.1)
    assert get_problem("burgers").constants["nu"] == pytest.approx(0.01 / np.pi)
    q = get_problem("cavity", n_interior=50)
    assert q.n_interior == 50


def test_problem_shapes():
    cav = get_problem("cavity")
    assert cav.order == 3 and cav.output_dim == 2
    assert sum(cav.boundary_counts.values()) == cav.n_boundary
    bur = get_problem("burgers")
    assert bur.order == 2 and bur.output_dim == 1


def test_default_network_config():
    p = get_problem("helmholtz14")
    cfg = default_network_config(p, "lda")
    assert cfg.hidden == (50, 50, 50, 50)
    assert cfg.output_dim == 1 and cfg.architecture == "lda"


# ---------------------------------------------------------------------------
# Residual operators vanish on their exact / manufactured solutions.
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["helmholtz14", "helmholtz44"])
def test_helmholtz_residual_vanishes_on_exact(name, rng):
    p = get_problem(name)
    pts = rng.uniform(-0.95, 0.95, size=(60, 2))
    u = exact_solution_jet(p, pts)
    r = residual_helmholtz(u, pts, p.constants["k"], p.constants["a1"],
                           p.constants["a2"])
    assert float(np.max(np.abs(r.value))) < 1e-8


def test_klein_gordon_residual_vanishes_on_manufactured(rng):
    p = get_problem("klein_gordon")
    pts = rng.uniform(0.02, 0.98, size=(60, 2))
    u = exact_solution_jet(p, pts)
    r = residual_klein_gordon(u, pts, **p.constants)
    assert float(np.max(np.abs(r.value))) < 1e-8


def test_burgers_residual_vanishes_on_oracle_jet(rng):
    p = get_problem("burgers")
    pts = np.column_stack([rng.uniform(-0.9, 0.9, 30),
                           rng.uniform(0.05, 0.95, 30)])
    u = exact_solution_jet(p, pts)
    r = residual_burgers(u, p.constants["nu"])
    assert float(np.max(np.abs(r.value))) < 1e-6


def test_cavity_residual_on_polynomial_flow(rng):
    # manufactured field psi = x^2 y^3, p = x y; substituting
    # u = psi_y = 3 x^2 y^2, v = -psi_x = -2 x y^3 into the momentum
    # equations gives (hand-expanded):
    #   rx = 6 x^3 y^4 + y - 6 (x^2 + y^2) / Re
    #   ry = 6 x^2 y^5 + x + 12 x y / Re
    re = 100.0
    pts = rng.uniform(0.05, 0.95, size=(40, 2))
    xj, yj = seed_point(pts, 3)
    psi = (xj * xj) * (yj * yj * yj)
    pressure = xj * yj
    rx, ry = residual_cavity(psi, pressure, re)
    x, y = pts[:, 0], pts[:, 1]
    want_rx = 6 * x ** 3 * y ** 4 + y - 6 * (x ** 2 + y ** 2) / re
    want_ry = 6 * x ** 2 * y ** 5 + x + 12 * x * y / re
    assert np.allclose(rx.value, want_rx, rtol=1e-11, atol=1e-11)
    assert np.allclose(ry.value, want_ry, rtol=1e-11, atol=1e-11)


def test_cavity_residual_on_shear_flow(rng):
    # psi = y^3/2 gives u = 1.5 y^2, v = 0: pure shear balanced only by
    # the constant viscous term, rx = -3/Re, ry = 0
    re = 100.0
    pts = rng.uniform(0.1, 0.9, size=(25, 2))
    _, yj = seed_point(pts, 3)
    psi = (yj * yj) * (yj * 0.5)
    rx, ry = residual_cavity(psi, constant(np.zeros(25), 2, 3), re)
    assert np.allclose(rx.value, -3.0 / re, rtol=1e-12)
    assert np.allclose(ry.value, 0.0, atol=1e-13)


def test_residual_requires_order():
    pts = np.array([[0.5, 0.5]])
    u1 = exact_solution_jet(get_problem("helmholtz14"), pts, order=1)
    with pytest.raises(ConfigurationError):
        residual_helmholtz(u1, pts, 1.0, 1.0, 4.0)


def test_forcing_values():
    # q at the domain center, from the closed form
    q = float(helmholtz_forcing(np.array([0.5, 0.125]), 1.0, 1.0, 4.0))
    want = (-(np.pi ** 2) - (4 * np.pi) ** 2 + 1.0) * np.sin(np.pi * 0.5) \
        * np.sin(4 * np.pi * 0.125)
    assert q == pytest.approx(want, rel=1e-14)
    f = float(forcing_klein_gordon(0.3, 0.7))
    u = 0.3 * np.cos(3.5 * np.pi) + (0.21) ** 3
    want = -25 * np.pi ** 2 * 0.3 * np.cos(3.5 * np.pi) \
        + 6 * 0.027 * 0.7 - 6 * 0.3 * 0.343 + u ** 3
    assert f == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# Condition targets.
# ---------------------------------------------------------------------------

def test_burgers_targets():
    p = get_problem("burgers")
    (ic,) = condition_targets(p, [(0.25, 0.0)])
    assert ic.kind == "initial"
    assert ic.value == pytest.approx(-np.sin(np.pi * 0.25))
    (bc,) = condition_targets(p, [(1.0, 0.7)])
    assert bc.kind == "boundary" and bc.value == 0.0
    with pytest.raises(DomainError):
        condition_targets(p, [(0.3, 0.4)])


def test_helmholtz_targets():
    p = get_problem("helmholtz14")
    got = condition_targets(p, [(-1.0, 0.3), (0.2, 1.0)])
    assert all(t.value == 0.0 and t.kind == "boundary" for t in got)


def test_klein_gordon_targets():
    p = get_problem("klein_gordon")
    targets = condition_targets(p, [(0.4, 0.0)])
    assert len(targets) == 2
    value, velocity = targets
    assert value.kind == "initial" and value.value == pytest.approx(0.4)
    assert velocity.component == "t_derivative" and velocity.value == 0.0
    (bc,) = condition_targets(p, [(1.0, 0.6)])
    assert bc.value == pytest.approx(float(klein_gordon_exact((1.0, 0.6))))


def test_cavity_targets():
    p = get_problem("cavity")
    lid = condition_targets(p, [(0.5, 1.0)])
    assert [(t.component, t.value) for t in lid] == [("u", 1.0), ("v", 0.0)]
    wall = condition_targets(p, [(0.0, 0.5)])
    assert [(t.component, t.value) for t in wall] == [("u", 0.0), ("v", 0.0)]
    corner = condition_targets(p, [(0.0, 0.0)])
    assert ("p", 0.0) in [(t.component, t.value) for t in corner]


# ---------------------------------------------------------------------------
# Exact solution fields.
# ---------------------------------------------------------------------------

def test_exact_solution_spot_values():
    hel = get_problem("helmholtz44")
    got = exact_solution(hel, [(0.125, 0.125)])
    assert float(got[0]) == pytest.approx(np.sin(np.pi * 0.5) ** 2, rel=1e-14)
    kg = get_problem("klein_gordon")
    got = exact_solution(kg, [(0.3, 0.7)])
    want = 0.3 * np.cos(3.5 * np.pi) + (0.3 * 0.7) ** 3
    assert float(got[0]) == pytest.approx(want, rel=1e-14)
    # frozen value of the viscous shock solution (quadrature oracle,
    # independently confirmed by a heat-equation finite difference solve)
    bur = get_problem("burgers")
    got = exact_solution(bur, [(0.25, 0.5)])
    assert float(got[0]) == pytest.approx(-0.8473545244509304, rel=1e-10)


def test_exact_solution_rejects_outside_domain():
    with pytest.raises(DomainError):
        exact_solution(get_problem("klein_gordon"), [(1.5, 0.5)])


def test_exact_jet_derivatives_match_closed_form(rng):
    # d/dx and d/dy of sin(pi x) sin(4 pi y)
    p = get_problem("helmholtz14")
    pts = rng.uniform(-0.9, 0.9, size=(10, 2))
    u = exact_solution_jet(p, pts)
    x, y = pts[:, 0], pts[:, 1]
    ux = np.pi * np.cos(np.pi * x) * np.sin(4 * np.pi * y)
    uyy = -(4 * np.pi) ** 2 * np.sin(np.pi * x) * np.sin(4 * np.pi * y)
    assert np.allclose(u.derivative((1, 0)), ux, rtol=1e-11, atol=1e-11)
    assert np.allclose(u.derivative((0, 2)), uyy, rtol=1e-11, atol=1e-10)
