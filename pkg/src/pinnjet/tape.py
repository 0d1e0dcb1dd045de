"""Reverse-mode tape over jet-valued operations.

Forward mode (the jets) carries derivatives with respect to PDE inputs;
this tape carries derivatives of a scalar loss with respect to network
parameters.  Every node holds a batched Jet; adjoints are arrays of the
same coefficient shape, because losses may be built from any jet
coefficient (an MSE of u_xx differentiates through second-derivative
coefficients like any other intermediate).

The key identity: every analytic operation on the truncated jet algebra is
locally linear in its operands' coefficient arrays, and its Jacobian acts as
multiplication by a stored partial jet.  The adjoint accumulation is then
the correlation  adj_parent[i] += sum_j adj_node[i+j] * partial[j],
implemented with the permuted triple tables in JetSpace.

Network activations use the channels-first layout (h, N, C): axis 0 the
neuron axis, axis 1 the collocation batch, axis 2 the jet coefficients.
That makes every affine a single GEMM on a zero-copy reshape.  Gradient
reductions over the batch happen inside those GEMMs with a fixed operand
order, so a fixed seed yields bitwise-reproducible training.  A tape is
single-threaded; distinct tapes are independent.
"""

from __future__ import annotations

import numpy as np

from pinnjet import _kernels
from pinnjet.errors import NumericError, ShapeError
from pinnjet.jets import Jet, compose, jet_space


class Node:
    __slots__ = ("kind", "parents", "jet", "aux")

    def __init__(self, kind, parents, jet, aux=None):
        self.kind = kind
        self.parents = parents
        self.jet = jet
        self.aux = aux


class Tape:
    """Append-only record of one forward computation."""

    def __init__(self):
        self.nodes: list[Node] = []

    def _push(self, kind, parents, jet, aux=None) -> "Var":
        self.nodes.append(Node(kind, parents, jet, aux))
        return Var(self, len(self.nodes) - 1, jet)

    def input(self, jet: Jet) -> "Var":
        """Leaf holding a (seeded or constant) jet; not differentiated."""
        return self._push("input", (), jet)

    def param(self, array: np.ndarray, offset: int) -> "Var":
        """Parameter leaf; offset locates its block in the flat gradient."""
        return self._push("param", (), None, (array, offset))


class Var:
    """Handle to one tape node, with jet-like arithmetic that records."""

    __slots__ = ("tape", "idx", "jet")

    def __init__(self, tape: Tape, idx: int, jet: Jet):
        self.tape = tape
        self.idx = idx
        self.jet = jet

    # -- peeks (not graph operations) ----------------------------------------
    @property
    def value(self) -> np.ndarray:
        return self.jet.value

    @property
    def space(self):
        return self.jet.space

    # -- recorded operations ---------------------------------------------------
    def _binary(self, other, kind):
        if isinstance(other, Var):
            jet = (self.jet + other.jet) if kind == "add" else (self.jet - other.jet)
            if self.jet.batch_shape != other.jet.batch_shape:
                raise ShapeError("taped binary ops require equal batch shapes")
            return self.tape._push(kind, (self.idx, other.idx), jet)
        const = np.asarray(other, dtype=np.float64)
        if kind == "sub":
            const = -const
        return self.tape._push("addc", (self.idx,), self.jet + const, const)

    def __add__(self, other):
        return self._binary(other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, "sub")

    def __rsub__(self, other):
        return (-self)._binary(other, "add")

    def __neg__(self):
        return self.tape._push("neg", (self.idx,), -self.jet)

    def __mul__(self, other):
        if isinstance(other, Var):
            if self.jet.batch_shape != other.jet.batch_shape:
                raise ShapeError("taped mul requires equal batch shapes")
            return self.tape._push("mul", (self.idx, other.idx), self.jet * other.jet)
        s = float(other)
        return self.tape._push("scale", (self.idx,), self.jet * s, s)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 1:
            raise ShapeError("taped powers support integer exponents >= 1")
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def _compose(self, fn_name):
        jet, partial = compose(self.jet, fn_name, with_partial=True)
        return self.tape._push("compose", (self.idx,), jet, partial)

    def tanh(self):
        return self._compose("tanh")

    def sigmoid(self):
        return self._compose("sigmoid")

    def d(self, alpha) -> "Var":
        """De-normalized derivative coefficient as an order-0 variable."""
        alpha = self.jet._as_alpha(alpha)
        sp = self.jet.space
        idx = sp.index.get(alpha)
        if idx is None:
            from pinnjet.errors import ConfigurationError
            raise ConfigurationError(
                f"derivative {alpha} exceeds jet order {sp.order}"
            )
        fact = float(sp.factorials[idx])
        out = Jet(jet_space(sp.dims, 0),
                  np.ascontiguousarray(fact * self.jet.coeffs[..., idx:idx + 1]))
        return self.tape._push("extract", (self.idx,), out, (idx, fact))

    def sum_sq(self) -> "Var":
        """Scalar node: sum over the batch of squared value coefficients."""
        v = self.jet.value
        total = float(np.sum(v * v))
        out = Jet(jet_space(self.jet.space.dims, 0), np.array([total]))
        return self.tape._push("sum_sq", (self.idx,), out)


def affine(w: Var, b: Var, x: Var) -> Var:
    """W @ x + b over channels-first jets: x is (h_in, N, C) -> (h_out, N, C).

    The bias enters the value coefficient only; derivative coefficients of a
    constant are zero.
    """
    weight, _ = w.tape.nodes[w.idx].aux
    bias, _ = b.tape.nodes[b.idx].aux
    coeffs = np.ascontiguousarray(x.jet.coeffs)
    h_in, n, c = coeffs.shape
    out = (weight @ coeffs.reshape(h_in, n * c)).reshape(-1, n, c)
    out[:, :, 0] += bias[:, None]
    jet = Jet(x.jet.space, out)
    return x.tape._push("affine", (w.idx, b.idx, x.idx), jet)


def concat_rows(vars_: list[Var]) -> Var:
    """Concatenate along the neuron axis (axis 0 of (h, N, C))."""
    tape = vars_[0].tape
    coeffs = np.concatenate([v.jet.coeffs for v in vars_], axis=0)
    sizes = tuple(v.jet.coeffs.shape[0] for v in vars_)
    jet = Jet(vars_[0].jet.space, coeffs)
    return tape._push("concat", tuple(v.idx for v in vars_), jet, sizes)


def take_row(x: Var, index: int) -> Var:
    """Drop to one neuron row: (h, N, C) -> (N, C)."""
    jet = Jet(x.jet.space, x.jet.coeffs[index])
    return x.tape._push("row", (x.idx,), jet, index)


def take_rows(x: Var, start: int, stop: int) -> Var:
    """Contiguous row range: (h, N, C) -> (stop - start, N, C)."""
    jet = Jet(x.jet.space, x.jet.coeffs[start:stop])
    return x.tape._push("rows", (x.idx,), jet, (start, stop))


def _corr_into(space, adj_out: np.ndarray, partial: np.ndarray, target: np.ndarray):
    """target[i] += sum adj_out[i+j] * partial[j], the product-rule adjoint."""
    n = space.ncoeffs
    if n == 1:
        target[..., 0] += adj_out[..., 0] * partial[..., 0]
        return
    g2 = adj_out.reshape(-1, n)
    p2 = np.ascontiguousarray(partial).reshape(-1, n)
    t2 = target.reshape(-1, n)
    if space.fast is not None:
        space.fast["corr"](g2, p2, t2)
    else:
        kk, jj, ii = space.adj_a_triples
        _kernels.mul_acc(g2, p2, t2, kk, jj, ii)


def backward(tape: Tape, loss: Var, n_params: int,
             check_nodes: bool = False) -> np.ndarray:
    """Gradient of the loss value w.r.t. all parameter leaves, flat.

    The loss node must be an order-0 scalar (batch shape ()).  Raises
    NumericError naming the first offending node if non-finite values are
    met; the cheap path checks only the final vector and re-runs with
    per-node checks to produce the diagnosis.
    """
    if loss.jet.coeffs.shape != (1,):
        raise ShapeError("backward expects a scalar order-0 loss node")
    nodes = tape.nodes
    top = loss.idx
    grad = np.zeros(n_params)
    adj: list[np.ndarray | None] = [None] * (top + 1)
    adj[top] = np.ones(1)

    # Adjoint buffers are owned by exactly one slot at a time.  A fresh
    # contribution is handed over instead of accumulated into a zero-filled
    # buffer ("give"); kernels that must accumulate get a calloc-backed
    # zero buffer on demand ("zeroed").  This avoids one full memset plus
    # one full add per edge on the big activation tensors.
    def zeroed(j: int) -> np.ndarray:
        a = adj[j]
        if a is None:
            a = adj[j] = np.zeros(nodes[j].jet.coeffs.shape)
        return a

    def give(j: int, arr: np.ndarray):
        cur = adj[j]
        if cur is None:
            adj[j] = arr
        else:
            cur += arr

    for i in range(top, -1, -1):
        a = adj[i]
        if a is None:
            continue
        adj[i] = None
        node = nodes[i]
        kind = node.kind
        if check_nodes and not np.all(np.isfinite(a)):
            raise NumericError(f"non-finite adjoint at node {i} ({kind})")
        if kind in ("input", "param"):
            continue
        if kind == "affine":
            iw, ib, ix = node.parents
            weight, w_off = nodes[iw].aux
            _, b_off = nodes[ib].aux
            x_coeffs = nodes[ix].jet.coeffs
            h_out = a.shape[0]
            h_in = x_coeffs.shape[0]
            g2 = a.reshape(h_out, -1)
            give(ix, (weight.T @ g2).reshape(x_coeffs.shape))
            dw = g2 @ np.ascontiguousarray(x_coeffs).reshape(h_in, -1).T
            grad[w_off:w_off + h_out * h_in] += dw.ravel()
            grad[b_off:b_off + h_out] += a[:, :, 0].sum(axis=1)
        elif kind == "add":
            ia, ib2 = node.parents
            give(ia, a)
            cur = adj[ib2]
            if cur is None:
                adj[ib2] = a.copy()
            else:
                cur += a
        elif kind == "sub":
            ia, ib2 = node.parents
            give(ia, a)
            cur = adj[ib2]
            if cur is None:
                adj[ib2] = -a
            else:
                cur -= a
        elif kind == "addc":
            give(node.parents[0], a)
        elif kind == "neg":
            np.negative(a, out=a)
            give(node.parents[0], a)
        elif kind == "scale":
            np.multiply(a, node.aux, out=a)
            give(node.parents[0], a)
        elif kind == "mul":
            ia, ib2 = node.parents
            sp = node.jet.space
            _corr_into(sp, a, nodes[ib2].jet.coeffs, zeroed(ia))
            _corr_into(sp, a, nodes[ia].jet.coeffs, zeroed(ib2))
        elif kind == "compose":
            (ia,) = node.parents
            _corr_into(node.aux.space, a, node.aux.coeffs, zeroed(ia))
        elif kind == "extract":
            (ia,) = node.parents
            idx, fact = node.aux
            zeroed(ia)[..., idx] += fact * a[..., 0]
        elif kind == "row":
            (ia,) = node.parents
            zeroed(ia)[node.aux] += a
        elif kind == "rows":
            (ia,) = node.parents
            start, stop = node.aux
            zeroed(ia)[start:stop] += a
        elif kind == "concat":
            pos = 0
            for j, size in zip(node.parents, node.aux):
                piece = a[pos:pos + size]
                cur = adj[j]
                if cur is None:
                    adj[j] = piece.copy()
                else:
                    cur += piece
                pos += size
        elif kind == "sum_sq":
            (ia,) = node.parents
            src = nodes[ia].jet.coeffs
            zeroed(ia)[..., 0] += (2.0 * a[0]) * src[..., 0]
        else:
            raise NumericError(f"unknown node kind {kind!r}")

    if not np.all(np.isfinite(grad)):
        if check_nodes:
            raise NumericError("non-finite gradient (no offending node found)")
        _diagnose_nonfinite(tape, loss, n_params)
        raise NumericError("non-finite gradient")
    return grad


def _diagnose_nonfinite(tape: Tape, loss: Var, n_params: int):
    """Locate the first non-finite node and raise with its identity."""
    for i, node in enumerate(tape.nodes):
        if node.jet is not None and not np.all(np.isfinite(node.jet.coeffs)):
            raise NumericError(f"non-finite forward value at node {i} ({node.kind})")
    backward(tape, loss, n_params, check_nodes=True)
