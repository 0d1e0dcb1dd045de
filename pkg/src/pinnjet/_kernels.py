"""Numba kernels for the hot jet operations.

Everything here works on 2-D float64 views (rows = batch elements, columns =
Taylor coefficients).  Index triples (i, j, k) encode the truncated
convolution out[k] += a[i]*b[j]; they are precomputed per (dims, order) by
the jets module.  Accumulation order is the triple order, fixed at table
construction, so results are bitwise reproducible.  fastmath stays off for
the same reason.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def mul_acc(x, y, z, ii, jj, kk):
    """z[m, kk[t]] += x[m, ii[t]] * y[m, jj[t]] for every row m, triple t.

    Serves jet multiplication (full triple table) and the two adjoint
    accumulations of a product/composition (permuted triple tables).
    """
    rows = x.shape[0]
    ntrip = ii.shape[0]
    for m in range(rows):
        for t in range(ntrip):
            z[m, kk[t]] += x[m, ii[t]] * y[m, jj[t]]


@njit(cache=True)
def compose_eval(a, cs, ii, jj, kk, out):
    """out[m] = sum_n cs[n, m] * w^n where w is a with its constant zeroed.

    The constant column of a is never copied out: power accumulation uses
    the reduced triple table (both factors of degree >= 1, so index 0 is
    never read) and the linear term overwrites column 0 with cs[0, m].
    The series arrays are row-major per order, one contiguous row each.
    """
    rows, ncoef = a.shape
    order = cs.shape[0] - 1
    ntrip = ii.shape[0]
    wp = np.empty(ncoef)
    wq = np.empty(ncoef)
    for m in range(rows):
        c1 = cs[1, m] if order >= 1 else 0.0
        for k in range(ncoef):
            out[m, k] = c1 * a[m, k]
        out[m, 0] = cs[0, m]
        if order >= 2:
            for k in range(ncoef):
                wp[k] = 0.0
            for t in range(ntrip):
                wp[kk[t]] += a[m, ii[t]] * a[m, jj[t]]
            c2 = cs[2, m]
            for k in range(ncoef):
                out[m, k] += c2 * wp[k]
            if order >= 3:
                for k in range(ncoef):
                    wq[k] = 0.0
                for t in range(ntrip):
                    wq[kk[t]] += wp[ii[t]] * a[m, jj[t]]
                c3 = cs[3, m]
                for k in range(ncoef):
                    out[m, k] += c3 * wq[k]


@njit(cache=True)
def compose_eval_pair(a, cs, ds, ii, jj, kk, out, partial):
    """Fused compose_eval for f (coefficients cs) and f' (coefficients ds).

    One pass produces the composed jet and the local partial jet that a
    tape node stores for the backward sweep.
    """
    rows, ncoef = a.shape
    order = cs.shape[0] - 1
    ntrip = ii.shape[0]
    wp = np.empty(ncoef)
    wq = np.empty(ncoef)
    for m in range(rows):
        c1 = cs[1, m] if order >= 1 else 0.0
        d1 = ds[1, m] if order >= 1 else 0.0
        for k in range(ncoef):
            out[m, k] = c1 * a[m, k]
            partial[m, k] = d1 * a[m, k]
        out[m, 0] = cs[0, m]
        partial[m, 0] = ds[0, m]
        if order >= 2:
            for k in range(ncoef):
                wp[k] = 0.0
            for t in range(ntrip):
                wp[kk[t]] += a[m, ii[t]] * a[m, jj[t]]
            c2 = cs[2, m]
            d2 = ds[2, m]
            for k in range(ncoef):
                out[m, k] += c2 * wp[k]
                partial[m, k] += d2 * wp[k]
            if order >= 3:
                for k in range(ncoef):
                    wq[k] = 0.0
                for t in range(ntrip):
                    wq[kk[t]] += wp[ii[t]] * a[m, jj[t]]
                c3 = cs[3, m]
                d3 = ds[3, m]
                for k in range(ncoef):
                    out[m, k] += c3 * wq[k]
                    partial[m, k] += d3 * wq[k]
