"""Non-neural reference solutions and the finite-difference derivative checker.

burgers_cole_hopf evaluates the exact solution of viscous Burgers with the
-sin(pi x) initial datum through the Cole-Hopf transform: the heat-equation
potential is an integral against a Gaussian kernel, computed here by
Gauss-Hermite quadrature after the substitution eta = x - 2 sqrt(nu t) z:

    u(x,t) = [ sum_m w_m 2 sqrt(nu/t) z_m phi0(eta_m) ]
             / [ sum_m w_m phi0(eta_m) ]
    phi0(y) = exp( (1 - cos(pi y)) / (2 pi nu) )

The exponent reaches 1/(pi nu) (100 at nu = 0.01/pi), so the per-point max
is subtracted before exponentiation; the shift cancels in the quotient.

cavity_fd_solve integrates the streamfunction-vorticity system to steady
state on a uniform grid: Poisson solve for psi, Thom wall vorticity, and a
pseudo-time vorticity transport step with implicit diffusion (both sparse
operators factorized once).

finite_diff_check provides central-difference stencils up to third order,
extended to mixed partials by tensor products of 1-D stencils.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from pinnjet.errors import AccuracyError, DomainError, ShapeError, SolverError
from pinnjet.jets import Jet

# ---------------------------------------------------------------------------
# Finite-difference derivative checks.
# ---------------------------------------------------------------------------

# central stencils as (offset, weight) pairs; divide by h^order
_STENCILS = {
    0: ((0, 1.0),),
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
}
_DEFAULT_H = {1: 1e-5, 2: 1e-4, 3: 1e-3}


@dataclass(frozen=True)
class FDResult:
    value: float
    order: int
    h: float
    stencil: tuple
    truncation_order: int = 2   # all central stencils here are O(h^2)


def finite_diff_check(f, point: float, order: int, h: float | None = None) -> FDResult:
    """Central-difference estimate of d^order f / dx^order at a scalar point."""
    if order not in (1, 2, 3):
        raise ShapeError("finite_diff_check supports orders 1..3")
    if h is None:
        h = _DEFAULT_H[order]
    if h <= 0:
        raise ShapeError("step h must be positive")
    stencil = _STENCILS[order]
    total = sum(wgt * f(point + off * h) for off, wgt in stencil)
    return FDResult(float(total / h ** order), order, h, stencil)


def finite_diff_partial(f, point, alpha, h: float | None = None) -> float:
    """Mixed partial d^alpha f at a vector point via tensor-product stencils.

    f takes a 1-D coordinate array; alpha is a per-dimension derivative
    order tuple with entries in 0..3.
    """
    point = np.asarray(point, dtype=np.float64)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != point.shape[-1]:
        raise ShapeError("alpha length must match point dimension")
    if any(a < 0 or a > 3 for a in alpha):
        raise ShapeError("per-dimension orders must be in 0..3")
    if h is None:
        h = _DEFAULT_H[max(max(alpha), 1)]
    total = 0.0
    stacks = [_STENCILS[a] for a in alpha]
    idx = [0] * len(alpha)
    while True:
        shift = point.copy()
        wgt = 1.0
        for dim, k in enumerate(idx):
            off, w = stacks[dim][k]
            shift[dim] += off * h
            wgt *= w
        total += wgt * f(shift)
        for dim in range(len(alpha)):
            idx[dim] += 1
            if idx[dim] < len(stacks[dim]):
                break
            idx[dim] = 0
        else:
            break
    return float(total / h ** sum(alpha))


# ---------------------------------------------------------------------------
# Burgers: Cole-Hopf quadrature oracle.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _hermgauss(n: int):
    z, w = np.polynomial.hermite.hermgauss(n)
    return z, w


def _cole_hopf_eval(x, t, nu, n_nodes):
    z, w = _hermgauss(n_nodes)
    s = 2.0 * np.sqrt(nu * t)                       # (m,)
    eta = x[:, None] - s[:, None] * z[None, :]       # (m, nodes)
    expo = (1.0 - np.cos(np.pi * eta)) / (2.0 * np.pi * nu)
    expo -= expo.max(axis=1, keepdims=True)
    phi = np.exp(expo) * w[None, :]
    den = phi.sum(axis=1)
    num = (phi * z[None, :]).sum(axis=1)
    return 2.0 * np.sqrt(nu / t) * num / den


def burgers_cole_hopf(x, t, nu: float, n_nodes: int = 160,
                      n_check: int = 200) -> np.ndarray:
    """Exact Burgers solution for u(x,0) = -sin(pi x) on x in [-1,1].

    Quadrature convergence is verified by re-evaluating with n_check nodes;
    relative disagreement above 1e-8 raises AccuracyError.  t = 0 returns
    the initial datum directly; t < 0 is outside the domain.
    """
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    x, t = np.broadcast_arrays(x, t)
    shape = x.shape
    x = x.ravel()
    t = t.ravel()
    if np.any(t < 0):
        raise DomainError("negative time in Cole-Hopf evaluation")
    out = np.empty_like(x)
    at0 = t == 0.0
    out[at0] = -np.sin(np.pi * x[at0])
    pos = ~at0
    if np.any(pos):
        xp, tp = x[pos], t[pos]
        chunk = 8192
        vals = np.empty_like(xp)
        for lo in range(0, xp.size, chunk):
            sl = slice(lo, lo + chunk)
            ua = _cole_hopf_eval(xp[sl], tp[sl], nu, n_nodes)
            ub = _cole_hopf_eval(xp[sl], tp[sl], nu, n_check)
            rel = np.abs(ua - ub) / np.maximum(1.0, np.abs(ub))
            if rel.max() > 1e-8:
                raise AccuracyError(
                    f"Cole-Hopf quadrature not converged: rel change {rel.max():.2e} "
                    f"between {n_nodes} and {n_check} nodes"
                )
            vals[sl] = ub
        out[pos] = vals
    return out.reshape(shape)


def burgers_cole_hopf_jet(xj: Jet, tj: Jet, nu: float, n_nodes: int = 200) -> Jet:
    """Cole-Hopf solution as a jet of the input jets (t values must be > 0).

    Evaluates the same quadrature quotient in jet arithmetic, which yields
    the solution's exact derivatives at the truncation order.  The overflow
    shift is applied to the value coefficient only (a constant per point),
    so derivative coefficients are untouched and the shift cancels exactly
    in the quotient.
    """
    tvals = np.asarray(tj.value)
    if np.any(tvals <= 0):
        raise DomainError("jet evaluation requires t > 0")
    z, w = _hermgauss(n_nodes)
    s = tj.sqrt()
    c = 2.0 * np.sqrt(nu)
    kexp = 1.0 / (2.0 * np.pi * nu)
    exps = []
    for zm in z:
        y = xj - (c * zm) * s
        exps.append((1.0 - (np.pi * y).cos()) * kexp)
    shift = np.max(np.stack([e.value for e in exps]), axis=0)
    num = None
    den = None
    for zm, wm, e in zip(z, w, exps):
        phi = (e - shift).exp()
        den = wm * phi if den is None else den + wm * phi
        term = (wm * zm) * phi
        num = term if num is None else num + term
    return (c * num) * den.reciprocal() * s.reciprocal()


# ---------------------------------------------------------------------------
# Lid-driven cavity: steady streamfunction-vorticity solver.
# ---------------------------------------------------------------------------

@dataclass
class ReferenceField:
    """Gridded reference velocity field on a uniform tensor grid."""
    x: np.ndarray          # (nx,)
    y: np.ndarray          # (ny,)
    u: np.ndarray          # (ny, nx), row-major in y
    v: np.ndarray          # (ny, nx)
    psi: np.ndarray | None = None

    @property
    def grid_n(self) -> int:
        return self.x.size

    def interp(self, points: np.ndarray) -> np.ndarray:
        """Bilinear (u, v) at arbitrary (n, 2) points inside the grid box."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if (pts[:, 0].min() < self.x[0] - 1e-12 or pts[:, 0].max() > self.x[-1] + 1e-12
                or pts[:, 1].min() < self.y[0] - 1e-12 or pts[:, 1].max() > self.y[-1] + 1e-12):
            raise DomainError("interpolation query outside the reference grid")
        hx = self.x[1] - self.x[0]
        hy = self.y[1] - self.y[0]
        fx = np.clip((pts[:, 0] - self.x[0]) / hx, 0, self.x.size - 1 - 1e-12)
        fy = np.clip((pts[:, 1] - self.y[0]) / hy, 0, self.y.size - 1 - 1e-12)
        ix = fx.astype(int)
        iy = fy.astype(int)
        ax = fx - ix
        ay = fy - iy
        out = np.empty((pts.shape[0], 2))
        for col, f in enumerate((self.u, self.v)):
            f00 = f[iy, ix]
            f01 = f[iy, ix + 1]
            f10 = f[iy + 1, ix]
            f11 = f[iy + 1, ix + 1]
            out[:, col] = ((1 - ay) * ((1 - ax) * f00 + ax * f01)
                           + ay * ((1 - ax) * f10 + ax * f11))
        return out


FIELD_FORMAT = "pinnjet-field-v1"


def save_field(field: ReferenceField, path) -> None:
    import json
    doc = {
        "format": FIELD_FORMAT,
        "x": field.x.tolist(),
        "y": field.y.tolist(),
        "u": field.u.tolist(),
        "v": field.v.tolist(),
    }
    if field.psi is not None:
        doc["psi"] = field.psi.tolist()
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_field(path) -> ReferenceField:
    import json
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != FIELD_FORMAT:
        raise ShapeError(f"unrecognized field format in {path}")
    psi = np.array(doc["psi"]) if "psi" in doc else None
    return ReferenceField(np.array(doc["x"]), np.array(doc["y"]),
                          np.array(doc["u"]), np.array(doc["v"]), psi)


def _laplacian_interior(n: int, h: float):
    """5-point Laplacian on the (n-2)^2 interior of an n x n grid."""
    m = n - 2
    main = -4.0 * np.ones(m * m)
    ew = np.ones(m * m - 1)
    ew[np.arange(1, m * m) % m == 0] = 0.0   # no coupling across row ends
    ns = np.ones(m * m - m)
    lap = sp.diags([main, ew, ew, ns, ns], [0, 1, -1, m, -m], format="csc")
    return lap / h ** 2


def cavity_fd_solve(re: float, grid_n: int = 129, tol: float = 1e-8,
                    max_steps: int = 400000) -> ReferenceField:
    """Steady lid-driven cavity on the unit square, lid velocity (1, 0).

    Pseudo-time iteration of the vorticity transport equation with central
    differences: Poisson solve for psi each step, Thom's formula for wall
    vorticity (under-relaxed), explicit convection, implicit diffusion.
    Runs until the normalized steady-state residual
    max|omega_new - omega| / (dt * max(1, max|omega|)) drops below tol.
    """
    if grid_n < 17:
        raise SolverError("grid too coarse for the cavity solver")
    n = grid_n
    h = 1.0 / (n - 1)
    x = np.linspace(0.0, 1.0, n)
    y = np.linspace(0.0, 1.0, n)
    m = n - 2

    lap = _laplacian_interior(n, h)
    poisson = splu(lap)
    # dt: convective CFL on lid speed 1; kinetic bound 2/(Re u^2) for explicit
    # central convection with implicit diffusion
    dt = 0.8 * min(h, 2.0 / re)
    helm = splu(sp.identity(m * m, format="csc") - (dt / re) * lap)

    psi = np.zeros((n, n))
    om = np.zeros((n, n))
    beta = 0.6    # wall vorticity under-relaxation

    def thom_walls(om, psi):
        # omega_wall = -2 (psi_adj - psi_wall)/h^2 - 2 U_wall/h (psi_wall = 0)
        om_new = om.copy()
        om_new[0, 1:-1] = (1 - beta) * om[0, 1:-1] + beta * (-2.0 * psi[1, 1:-1] / h ** 2)
        om_new[-1, 1:-1] = (1 - beta) * om[-1, 1:-1] + beta * (
            -2.0 * psi[-2, 1:-1] / h ** 2 - 2.0 / h)
        om_new[1:-1, 0] = (1 - beta) * om[1:-1, 0] + beta * (-2.0 * psi[1:-1, 1] / h ** 2)
        om_new[1:-1, -1] = (1 - beta) * om[1:-1, -1] + beta * (-2.0 * psi[1:-1, -2] / h ** 2)
        return om_new

    for step in range(1, max_steps + 1):
        psi_int = poisson.solve(-om[1:-1, 1:-1].ravel())
        psi[1:-1, 1:-1] = psi_int.reshape(m, m)

        u = np.zeros((n, n))
        v = np.zeros((n, n))
        u[1:-1, 1:-1] = (psi[2:, 1:-1] - psi[:-2, 1:-1]) / (2 * h)
        v[1:-1, 1:-1] = -(psi[1:-1, 2:] - psi[1:-1, :-2]) / (2 * h)
        u[-1, :] = 1.0

        om = thom_walls(om, psi)

        om_x = (om[1:-1, 2:] - om[1:-1, :-2]) / (2 * h)
        om_y = (om[2:, 1:-1] - om[:-2, 1:-1]) / (2 * h)
        conv = u[1:-1, 1:-1] * om_x + v[1:-1, 1:-1] * om_y

        rhs = om[1:-1, 1:-1] - dt * conv
        # implicit diffusion couples to the (frozen) wall vorticity
        bc = np.zeros((m, m))
        bc[0, :] += om[0, 1:-1]
        bc[-1, :] += om[-1, 1:-1]
        bc[:, 0] += om[1:-1, 0]
        bc[:, -1] += om[1:-1, -1]
        rhs += (dt / re) * bc / h ** 2

        om_int_new = helm.solve(rhs.ravel()).reshape(m, m)
        diff = np.max(np.abs(om_int_new - om[1:-1, 1:-1]))
        om[1:-1, 1:-1] = om_int_new

        if not np.isfinite(diff):
            raise SolverError(f"cavity iteration diverged at step {step}")
        resid = diff / (dt * max(1.0, np.abs(om).max()))
        if resid < tol:
            break
    else:
        raise SolverError(
            f"cavity solver did not converge in {max_steps} steps "
            f"(residual {resid:.3e}, tol {tol:.1e})"
        )

    # final kinematics from the converged streamfunction
    psi_int = poisson.solve(-om[1:-1, 1:-1].ravel())
    psi[1:-1, 1:-1] = psi_int.reshape(m, m)
    u = np.zeros((n, n))
    v = np.zeros((n, n))
    u[1:-1, 1:-1] = (psi[2:, 1:-1] - psi[:-2, 1:-1]) / (2 * h)
    v[1:-1, 1:-1] = -(psi[1:-1, 2:] - psi[1:-1, :-2]) / (2 * h)
    u[-1, :] = 1.0
    return ReferenceField(x, y, u, v, psi)


@lru_cache(maxsize=4)
def _cavity_cached(re: float, grid_n: int) -> ReferenceField:
    return cavity_fd_solve(re, grid_n)


def cavity_reference(re: float, grid_n: int = 129) -> ReferenceField:
    """Cached front-end to cavity_fd_solve (one solve per process)."""
    return _cavity_cached(float(re), int(grid_n))
