"""Truncated multivariate Taylor jets.

A jet carries the Taylor coefficients of a scalar quantity with respect to
the PDE input variables, up to a fixed total degree.  Coefficients are
stored normalized, coeffs[idx(alpha)] = (d^alpha u) / alpha!, which keeps
multiplication a plain truncated convolution over multi-indices; consumers
that need raw derivatives (PDE residuals) multiply back by alpha! via
``Jet.derivative``.

Layout: the trailing axis of ``coeffs`` is the coefficient axis; any leading
axes are free batch axes, so one Jet holds the expansion at many points at
once.  Multi-indices are ordered graded-lexicographically, e.g. for dims=2,
order=2: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).

Supported analytic compositions propagate scalar derivative series through
the jet algebra: f(a) = sum_n f^(n)(a0)/n! * (a - a0)^n with all products
truncated.  All arithmetic is float64; lower precision fails the
finite-difference tolerances the test suite enforces.
"""

from __future__ import annotations

import math

import numpy as np

from pinnjet import _kernels, _unrolled
from pinnjet.errors import ConfigurationError, ShapeError

MAX_ORDER = 3
MAX_DIMS = 2

# Test hook: scales the first tanh derivative in the recurrence, corrupting
# every derivative coefficient of jet_tanh (values stay correct).  Used by
# the validation suite's negative control; must be 1.0 in real use.
_TANH_DERIVATIVE_SCALE = 1.0


def multi_indices(dims: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices of total degree <= order, graded-lex order."""
    out = []
    for deg in range(order + 1):
        if dims == 1:
            out.append((deg,))
        else:
            for i in range(deg, -1, -1):
                out.append((i, deg - i))
    return tuple(out)


class JetSpace:
    """Shared tables for jets of one (dims, order) pair."""

    __slots__ = (
        "dims", "order", "mi", "index", "ncoeffs", "factorials",
        "mul_triples", "pow_triples", "adj_a_triples", "adj_b_triples",
        "fast",
    )

    def __init__(self, dims: int, order: int):
        if not 1 <= dims <= MAX_DIMS:
            raise ConfigurationError(f"jet dims must be 1..{MAX_DIMS}, got {dims}")
        if not 0 <= order <= MAX_ORDER:
            raise ConfigurationError(f"jet order must be 0..{MAX_ORDER}, got {order}")
        self.dims = dims
        self.order = order
        self.mi = multi_indices(dims, order)
        self.index = {m: i for i, m in enumerate(self.mi)}
        self.ncoeffs = len(self.mi)
        self.factorials = np.array(
            [math.prod(math.factorial(a) for a in m) for m in self.mi], dtype=np.float64
        )
        trip = []
        for i, a in enumerate(self.mi):
            for j, b in enumerate(self.mi):
                tot = tuple(x + y for x, y in zip(a, b))
                k = self.index.get(tot)
                if k is not None:
                    trip.append((i, j, k))
        ii = np.array([t[0] for t in trip], dtype=np.int64)
        jj = np.array([t[1] for t in trip], dtype=np.int64)
        kk = np.array([t[2] for t in trip], dtype=np.int64)
        self.mul_triples = (ii, jj, kk)
        # Adjoint tables: for out[k] += a[i]*b[j],
        #   grad_a[i] += grad_out[k]*b[j]  and  grad_b[j] += grad_out[k]*a[i].
        self.adj_a_triples = (kk, jj, ii)
        self.adj_b_triples = (kk, ii, jj)
        # Reduced table for powers of w = a - a0 (no constant term): both
        # factors of degree >= 1, so kernels never read coefficient 0.
        pos = [(i, j, k) for i, j, k in trip
               if sum(self.mi[i]) >= 1 and sum(self.mi[j]) >= 1]
        self.pow_triples = (
            np.array([t[0] for t in pos], dtype=np.int64),
            np.array([t[1] for t in pos], dtype=np.int64),
            np.array([t[2] for t in pos], dtype=np.int64),
        )
        # Unrolled kernels exist for the hot (dims, order) pairs; spaces
        # without one fall back to the table-driven generic kernels.
        self.fast = _unrolled.KERNELS.get((dims, order))

    def __repr__(self):
        return f"JetSpace(dims={self.dims}, order={self.order})"


_SPACES: dict[tuple[int, int], JetSpace] = {}


def jet_space(dims: int, order: int) -> JetSpace:
    key = (dims, order)
    sp = _SPACES.get(key)
    if sp is None:
        sp = _SPACES[key] = JetSpace(dims, order)
    return sp


def _flat2d(coeffs: np.ndarray) -> np.ndarray:
    """C-contiguous (rows, ncoeffs) view, copying only if needed."""
    arr = np.ascontiguousarray(coeffs)
    return arr.reshape(-1, arr.shape[-1])


# ---------------------------------------------------------------------------
# Derivative series for analytic compositions.  Each helper returns the list
# [f(a0), f'(a0), ..., f^(n)(a0)]; the composition machinery normalizes.
# ---------------------------------------------------------------------------

def _tanh_derivs(a0, n):
    t0 = np.tanh(a0)
    d = [t0]
    if n >= 1:
        d.append((1.0 - t0 * t0) * _TANH_DERIVATIVE_SCALE)
    if n >= 2:
        d.append(-2.0 * t0 * d[1])
    if n >= 3:
        d.append(-2.0 * (d[1] * d[1] + t0 * d[2]))
    if n >= 4:
        d.append(-2.0 * (3.0 * d[1] * d[2] + t0 * d[3]))
    return d


def _sigmoid_derivs(a0, n):
    s0 = 1.0 / (1.0 + np.exp(-a0))
    d = [s0]
    if n >= 1:
        d.append(s0 * (1.0 - s0))
    if n >= 2:
        d.append(d[1] * (1.0 - 2.0 * s0))
    if n >= 3:
        d.append(d[2] * (1.0 - 2.0 * s0) - 2.0 * d[1] * d[1])
    if n >= 4:
        d.append(d[3] * (1.0 - 2.0 * s0) - 6.0 * d[1] * d[2])
    return d


def _sin_derivs(a0, n):
    s, c = np.sin(a0), np.cos(a0)
    cycle = (s, c, -s, -c)
    return [cycle[k % 4] for k in range(n + 1)]


def _cos_derivs(a0, n):
    s, c = np.sin(a0), np.cos(a0)
    cycle = (c, -s, -c, s)
    return [cycle[k % 4] for k in range(n + 1)]


def _exp_derivs(a0, n):
    e = np.exp(a0)
    return [e] * (n + 1)


def _sqrt_derivs(a0, n):
    # f^(k) = (1/2)(1/2 - 1)...(1/2 - k + 1) * a^(1/2 - k), built iteratively.
    r = np.sqrt(a0)
    inv = 1.0 / a0
    d = [r]
    cur = r
    for k in range(1, n + 1):
        cur = cur * (0.5 - (k - 1)) * inv
        d.append(cur)
    return d


def _reciprocal_derivs(a0, n):
    inv = 1.0 / a0
    d = [inv]
    cur = inv
    for k in range(1, n + 1):
        cur = cur * (-k) * inv
        d.append(cur)
    return d


_SERIES = {
    "tanh": _tanh_derivs,
    "sigmoid": _sigmoid_derivs,
    "sin": _sin_derivs,
    "cos": _cos_derivs,
    "exp": _exp_derivs,
    "sqrt": _sqrt_derivs,
    "reciprocal": _reciprocal_derivs,
}


def _series_arrays(fn_name: str, a0_flat: np.ndarray, order: int, with_partial: bool):
    """Normalized coefficient rows (order+1, #points) for f and optionally f'.

    cs[n] = f^(n)(a0)/n!; ds[n] = f^(n+1)(a0)/n!.  The extra derivative
    order in ds makes the stored partial the exact Jacobian of the
    truncated composition, which the tape's backward sweep relies on.
    Row-major so the compose kernels read each order as a contiguous slice.
    """
    top = order + 1 if with_partial else order
    derivs = _SERIES[fn_name](a0_flat, top)
    rows = a0_flat.shape[0]
    cs = np.empty((order + 1, rows))
    for n in range(order + 1):
        np.multiply(derivs[n], 1.0 / math.factorial(n), out=cs[n])
    if not with_partial:
        return cs, None
    ds = np.empty((order + 1, rows))
    for n in range(order + 1):
        np.multiply(derivs[n + 1], 1.0 / math.factorial(n), out=ds[n])
    return cs, ds


def compose(jet: "Jet", fn_name: str, with_partial: bool = False):
    """Composition f(jet) for an analytic f named in _SERIES.

    Returns the composed Jet, or (composed, partial) when with_partial is
    set; partial is the jet of f'(a), the local derivative a tape node
    stores for reverse mode.
    """
    sp = jet.space
    a0 = jet.coeffs[..., 0]
    cs, ds = _series_arrays(fn_name, np.ravel(a0), sp.order, with_partial)
    shape = jet.coeffs.shape
    if sp.ncoeffs == 1:
        out = Jet(sp, cs[0].reshape(shape))
        if not with_partial:
            return out
        return out, Jet(sp, ds[0].reshape(shape))
    a2 = _flat2d(jet.coeffs)
    out2 = np.empty_like(a2)
    if not with_partial:
        if sp.fast is not None:
            sp.fast["compose"](a2, cs, out2)
        else:
            ii, jj, kk = sp.pow_triples
            _kernels.compose_eval(a2, cs, ii, jj, kk, out2)
        return Jet(sp, out2.reshape(shape))
    partial2 = np.empty_like(a2)
    if sp.fast is not None:
        sp.fast["compose_pair"](a2, cs, ds, out2, partial2)
    else:
        ii, jj, kk = sp.pow_triples
        _kernels.compose_eval_pair(a2, cs, ds, ii, jj, kk, out2, partial2)
    return Jet(sp, out2.reshape(shape)), Jet(sp, partial2.reshape(shape))


# ---------------------------------------------------------------------------
# The Jet value type.
# ---------------------------------------------------------------------------

class Jet:
    """Batched truncated Taylor expansion; see module docstring for layout."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: JetSpace, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.ndim == 0 or coeffs.shape[-1] != space.ncoeffs:
            raise ShapeError(
                f"coefficient axis must have length {space.ncoeffs} for {space}"
            )
        self.space = space
        self.coeffs = coeffs

    # -- introspection ------------------------------------------------------
    @property
    def order(self) -> int:
        return self.space.order

    @property
    def dims(self) -> int:
        return self.space.dims

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def value(self) -> np.ndarray:
        """Zeroth coefficient: the plain function value."""
        return self.coeffs[..., 0]

    def derivative(self, alpha) -> np.ndarray:
        """Raw derivative d^alpha u: the normalized coefficient times alpha!."""
        alpha = self._as_alpha(alpha)
        idx = self.space.index.get(alpha)
        if idx is None:
            raise ConfigurationError(
                f"derivative {alpha} exceeds jet order {self.space.order}"
            )
        return self.space.factorials[idx] * self.coeffs[..., idx]

    def d(self, alpha) -> "Jet":
        """Raw derivative wrapped as an order-0 jet, for residual arithmetic."""
        val = self.derivative(alpha)
        return Jet(jet_space(self.space.dims, 0), val[..., None])

    def _as_alpha(self, alpha) -> tuple[int, ...]:
        if isinstance(alpha, int):
            alpha = (alpha,)
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.space.dims:
            raise ShapeError(f"multi-index {alpha} has wrong length for {self.space}")
        return alpha

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: "Jet"):
        if other.space is not self.space:
            if (other.space.dims, other.space.order) != (self.space.dims, self.space.order):
                raise ShapeError(f"jet mismatch: {self.space} vs {other.space}")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check_same(other)
            return Jet(self.space, self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[..., 0] = out[..., 0] + other
        return Jet(self.space, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check_same(other)
            return Jet(self.space, self.coeffs - other.coeffs)
        out = self.coeffs.copy()
        out[..., 0] = out[..., 0] - other
        return Jet(self.space, out)

    def __rsub__(self, other):
        out = -self.coeffs
        out[..., 0] += other
        return Jet(self.space, out)

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check_same(other)
            a, b = self.coeffs, other.coeffs
            if a.shape != b.shape:
                a, b = np.broadcast_arrays(a, b)
            if self.space.ncoeffs == 1:
                return Jet(self.space, a * b)
            a2, b2 = _flat2d(a), _flat2d(b)
            if self.space.fast is not None:
                out = np.empty_like(a2)
                self.space.fast["mul"](a2, b2, out)
            else:
                out = np.zeros_like(a2)
                ii, jj, kk = self.space.mul_triples
                _kernels.mul_acc(a2, b2, out, ii, jj, kk)
            return Jet(self.space, out.reshape(a.shape))
        # scalar, or an array constant that varies with the batch point but
        # is independent of the jet variables (e.g. quadrature weights)
        s = np.asarray(other, dtype=np.float64)
        if s.ndim:
            s = s[..., None]
        return Jet(self.space, self.coeffs * s)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * compose(other, "reciprocal")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return compose(self, "reciprocal") * other

    def __pow__(self, n):
        if not isinstance(n, int) or n < 1:
            raise ConfigurationError("jet powers support integer exponents >= 1")
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    # -- compositions -------------------------------------------------------
    def tanh(self) -> "Jet":
        return compose(self, "tanh")

    def sigmoid(self) -> "Jet":
        return compose(self, "sigmoid")

    def sin(self) -> "Jet":
        return compose(self, "sin")

    def cos(self) -> "Jet":
        return compose(self, "cos")

    def exp(self) -> "Jet":
        return compose(self, "exp")

    def sqrt(self) -> "Jet":
        return compose(self, "sqrt")

    def reciprocal(self) -> "Jet":
        return compose(self, "reciprocal")

    def __repr__(self):
        return f"Jet({self.space!r}, batch={self.batch_shape})"


# ---------------------------------------------------------------------------
# Constructors and the generic arithmetic entry point.
# ---------------------------------------------------------------------------

def seed_input(var_index: int, value, dims: int, order: int) -> Jet:
    """Jet of the input variable ``var_index`` at coordinate ``value``.

    The zero multi-index coefficient is the value, the first-order
    coefficient of the seeded variable is 1, everything else 0.  ``value``
    may be an array; its shape becomes the batch shape.
    """
    if not 1 <= order <= MAX_ORDER:
        raise ConfigurationError(f"seed order must be 1..{MAX_ORDER}, got {order}")
    sp = jet_space(dims, order)
    if not 0 <= var_index < dims:
        raise ConfigurationError(f"var_index {var_index} out of range for dims={dims}")
    value = np.asarray(value, dtype=np.float64)
    coeffs = np.zeros(value.shape + (sp.ncoeffs,))
    coeffs[..., 0] = value
    unit = tuple(1 if i == var_index else 0 for i in range(dims))
    coeffs[..., sp.index[unit]] = 1.0
    return Jet(sp, coeffs)


def constant(value, dims: int, order: int) -> Jet:
    """Jet of a constant: value coefficient only, all derivatives zero."""
    sp = jet_space(dims, order)
    value = np.asarray(value, dtype=np.float64)
    coeffs = np.zeros(value.shape + (sp.ncoeffs,))
    coeffs[..., 0] = value
    return Jet(sp, coeffs)


def seed_point(point, order: int) -> list[Jet]:
    """Seed every coordinate of a point (or batch of points, shape (n, d))."""
    pt = np.asarray(point, dtype=np.float64)
    if pt.ndim == 1:
        dims = pt.shape[0]
        return [seed_input(i, pt[i], dims, order) for i in range(dims)]
    dims = pt.shape[1]
    return [seed_input(i, pt[:, i], dims, order) for i in range(dims)]


def jet_seed_input(var_index: int, value, dims: int, order: int) -> Jet:
    """Spec-facing alias of seed_input."""
    return seed_input(var_index, value, dims, order)


def jet_arith(kind: str, a: Jet, b=None) -> Jet:
    """Dispatch basic arithmetic by name; used by the validation suite."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "scale":
        return a * float(b)
    if kind == "neg":
        return -a
    raise ConfigurationError(f"unknown jet arithmetic kind {kind!r}")


def jet_tanh(a: Jet) -> Jet:
    """Spec-facing alias of Jet.tanh."""
    return compose(a, "tanh")
