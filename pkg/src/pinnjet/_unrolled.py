"""Unrolled jet kernels for the 2-input spaces (orders 1..3).

Generated by scripts/generate_kernels.py; edit that script, not this file.
Each kernel mirrors its generic counterpart in pinnjet._kernels with the
index-triple loops expanded to straight-line code, keeping per-row
coefficients in registers.  Per-slot accumulation order matches the triple
enumeration, so results are deterministic.  fastmath stays off.
"""

from numba import njit


@njit(cache=True)
def mul_2_1(x, y, z):
    for m in range(x.shape[0]):
        x0 = x[m, 0]; x1 = x[m, 1]; x2 = x[m, 2]
        y0 = y[m, 0]; y1 = y[m, 1]; y2 = y[m, 2]
        z[m, 0] = x0 * y0
        z[m, 1] = x0 * y1 + x1 * y0
        z[m, 2] = x0 * y2 + x2 * y0

@njit(cache=True)
def corr_2_1(g, p, z):
    for m in range(g.shape[0]):
        g0 = g[m, 0]; g1 = g[m, 1]; g2 = g[m, 2]
        p0 = p[m, 0]; p1 = p[m, 1]; p2 = p[m, 2]
        z[m, 0] += g0 * p0 + g1 * p1 + g2 * p2
        z[m, 1] += g1 * p0
        z[m, 2] += g2 * p0

@njit(cache=True)
def compose_2_1(a, cs, out):
    for m in range(a.shape[0]):
        a1 = a[m, 1]; a2 = a[m, 2]
        c1 = cs[1, m]
        out[m, 0] = cs[0, m]
        out[m, 1] = c1 * a1
        out[m, 2] = c1 * a2

@njit(cache=True)
def compose_pair_2_1(a, cs, ds, out, partial):
    for m in range(a.shape[0]):
        a1 = a[m, 1]; a2 = a[m, 2]
        c1 = cs[1, m]
        d1 = ds[1, m]
        out[m, 0] = cs[0, m]
        out[m, 1] = c1 * a1
        out[m, 2] = c1 * a2
        partial[m, 0] = ds[0, m]
        partial[m, 1] = d1 * a1
        partial[m, 2] = d1 * a2

@njit(cache=True)
def mul_2_2(x, y, z):
    for m in range(x.shape[0]):
        x0 = x[m, 0]; x1 = x[m, 1]; x2 = x[m, 2]; x3 = x[m, 3]
        x4 = x[m, 4]; x5 = x[m, 5]
        y0 = y[m, 0]; y1 = y[m, 1]; y2 = y[m, 2]; y3 = y[m, 3]
        y4 = y[m, 4]; y5 = y[m, 5]
        z[m, 0] = x0 * y0
        z[m, 1] = x0 * y1 + x1 * y0
        z[m, 2] = x0 * y2 + x2 * y0
        z[m, 3] = x0 * y3 + x1 * y1 + x3 * y0
        z[m, 4] = x0 * y4 + x1 * y2 + x2 * y1 + x4 * y0
        z[m, 5] = x0 * y5 + x2 * y2 + x5 * y0

@njit(cache=True)
def corr_2_2(g, p, z):
    for m in range(g.shape[0]):
        g0 = g[m, 0]; g1 = g[m, 1]; g2 = g[m, 2]; g3 = g[m, 3]
        g4 = g[m, 4]; g5 = g[m, 5]
        p0 = p[m, 0]; p1 = p[m, 1]; p2 = p[m, 2]; p3 = p[m, 3]
        p4 = p[m, 4]; p5 = p[m, 5]
        z[m, 0] += g0 * p0 + g1 * p1 + g2 * p2 + g3 * p3 + g4 * p4 + g5 * p5
        z[m, 1] += g1 * p0 + g3 * p1 + g4 * p2
        z[m, 2] += g2 * p0 + g4 * p1 + g5 * p2
        z[m, 3] += g3 * p0
        z[m, 4] += g4 * p0
        z[m, 5] += g5 * p0

@njit(cache=True)
def compose_2_2(a, cs, out):
    for m in range(a.shape[0]):
        a1 = a[m, 1]; a2 = a[m, 2]; a3 = a[m, 3]; a4 = a[m, 4]
        a5 = a[m, 5]
        c1 = cs[1, m]
        c2 = cs[2, m]
        w2_3 = a1 * a1
        w2_4 = a1 * a2 + a2 * a1
        w2_5 = a2 * a2
        out[m, 0] = cs[0, m]
        out[m, 1] = c1 * a1
        out[m, 2] = c1 * a2
        out[m, 3] = c1 * a3 + c2 * w2_3
        out[m, 4] = c1 * a4 + c2 * w2_4
        out[m, 5] = c1 * a5 + c2 * w2_5

@njit(cache=True)
def compose_pair_2_2(a, cs, ds, out, partial):
    for m in range(a.shape[0]):
        a1 = a[m, 1]; a2 = a[m, 2]; a3 = a[m, 3]; a4 = a[m, 4]
        a5 = a[m, 5]
        c1 = cs[1, m]
        c2 = cs[2, m]
        d1 = ds[1, m]
        d2 = ds[2, m]
        w2_3 = a1 * a1
        w2_4 = a1 * a2 + a2 * a1
        w2_5 = a2 * a2
        out[m, 0] = cs[0, m]
        out[m, 1] = c1 * a1
        out[m, 2] = c1 * a2
        out[m, 3] = c1 * a3 + c2 * w2_3
        out[m, 4] = c1 * a4 + c2 * w2_4
        out[m, 5] = c1 * a5 + c2 * w2_5
        partial[m, 0] = ds[0, m]
        partial[m, 1] = d1 * a1
        partial[m, 2] = d1 * a2
        partial[m, 3] = d1 * a3 + d2 * w2_3
        partial[m, 4] = d1 * a4 + d2 * w2_4
        partial[m, 5] = d1 * a5 + d2 * w2_5

@njit(cache=True)
def mul_2_3(x, y, z):
    for m in range(x.shape[0]):
        x0 = x[m, 0]; x1 = x[m, 1]; x2 = x[m, 2]; x3 = x[m, 3]
        x4 = x[m, 4]; x5 = x[m, 5]; x6 = x[m, 6]; x7 = x[m, 7]
        x8 = x[m, 8]; x9 = x[m, 9]
        y0 = y[m, 0]; y1 = y[m, 1]; y2 = y[m, 2]; y3 = y[m, 3]
        y4 = y[m, 4]; y5 = y[m, 5]; y6 = y[m, 6]; y7 = y[m, 7]
        y8 = y[m, 8]; y9 = y[m, 9]
        z[m, 0] = x0 * y0
        z[m, 1] = x0 * y1 + x1 * y0
        z[m, 2] = x0 * y2 + x2 * y0
        z[m, 3] = x0 * y3 + x1 * y1 + x3 * y0
        z[m, 4] = x0 * y4 + x1 * y2 + x2 * y1 + x4 * y0
        z[m, 5] = x0 * y5 + x2 * y2 + x5 * y0
        z[m, 6] = x0 * y6 + x1 * y3 + x3 * y1 + x6 * y0
        z[m, 7] = x0 * y7 + x1 * y4 + x2 * y3 + x3 * y2 + x4 * y1 + x7 * y0
        z[m, 8] = x0 * y8 + x1 * y5 + x2 * y4 + x4 * y2 + x5 * y1 + x8 * y0
        z[m, 9] = x0 * y9 + x2 * y5 + x5 * y2 + x9 * y0

@njit(cache=True)
def corr_2_3(g, p, z):
    for m in range(g.shape[0]):
        g0 = g[m, 0]; g1 = g[m, 1]; g2 = g[m, 2]; g3 = g[m, 3]
        g4 = g[m, 4]; g5 = g[m, 5]; g6 = g[m, 6]; g7 = g[m, 7]
        g8 = g[m, 8]; g9 = g[m, 9]
        p0 = p[m, 0]; p1 = p[m, 1]; p2 = p[m, 2]; p3 = p[m, 3]
        p4 = p[m, 4]; p5 = p[m, 5]; p6 = p[m, 6]; p7 = p[m, 7]
        p8 = p[m, 8]; p9 = p[m, 9]
        z[m, 0] += g0 * p0 + g1 * p1 + g2 * p2 + g3 * p3 + g4 * p4 + g5 * p5 + g6 * p6 + g7 * p7 + g8 * p8 + g9 * p9
        z[m, 1] += g1 * p0 + g3 * p1 + g4 * p2 + g6 * p3 + g7 * p4 + g8 * p5
        z[m, 2] += g2 * p0 + g4 * p1 + g5 * p2 + g7 * p3 + g8 * p4 + g9 * p5
        z[m, 3] += g3 * p0 + g6 * p1 + g7 * p2
        z[m, 4] += g4 * p0 + g7 * p1 + g8 * p2
        z[m, 5] += g5 * p0 + g8 * p1 + g9 * p2
        z[m, 6] += g6 * p0
        z[m, 7] += g7 * p0
        z[m, 8] += g8 * p0
        z[m, 9] += g9 * p0

@njit(cache=True)
def compose_2_3(a, cs, out):
    for m in range(a.shape[0]):
        a1 = a[m, 1]; a2 = a[m, 2]; a3 = a[m, 3]; a4 = a[m, 4]
        a5 = a[m, 5]; a6 = a[m, 6]; a7 = a[m, 7]; a8 = a[m, 8]
        a9 = a[m, 9]
        c1 = cs[1, m]
        c2 = cs[2, m]
        c3 = cs[3, m]
        w2_3 = a1 * a1
        w2_4 = a1 * a2 + a2 * a1
        w2_5 = a2 * a2
        w2_6 = a1 * a3 + a3 * a1
        w2_7 = a1 * a4 + a2 * a3 + a3 * a2 + a4 * a1
        w2_8 = a1 * a5 + a2 * a4 + a4 * a2 + a5 * a1
        w2_9 = a2 * a5 + a5 * a2
        w3_6 = w2_3 * a1
        w3_7 = w2_3 * a2 + w2_4 * a1
        w3_8 = w2_4 * a2 + w2_5 * a1
        w3_9 = w2_5 * a2
        out[m, 0] = cs[0, m]
        out[m, 1] = c1 * a1
        out[m, 2] = c1 * a2
        out[m, 3] = c1 * a3 + c2 * w2_3
        out[m, 4] = c1 * a4 + c2 * w2_4
        out[m, 5] = c1 * a5 + c2 * w2_5
        out[m, 6] = c1 * a6 + c2 * w2_6 + c3 * w3_6
        out[m, 7] = c1 * a7 + c2 * w2_7 + c3 * w3_7
        out[m, 8] = c1 * a8 + c2 * w2_8 + c3 * w3_8
        out[m, 9] = c1 * a9 + c2 * w2_9 + c3 * w3_9

@njit(cache=True)
def compose_pair_2_3(a, cs, ds, out, partial):
    for m in range(a.shape[0]):
        a1 = a[m, 1]; a2 = a[m, 2]; a3 = a[m, 3]; a4 = a[m, 4]
        a5 = a[m, 5]; a6 = a[m, 6]; a7 = a[m, 7]; a8 = a[m, 8]
        a9 = a[m, 9]
        c1 = cs[1, m]
        c2 = cs[2, m]
        c3 = cs[3, m]
        d1 = ds[1, m]
        d2 = ds[2, m]
        d3 = ds[3, m]
        w2_3 = a1 * a1
        w2_4 = a1 * a2 + a2 * a1
        w2_5 = a2 * a2
        w2_6 = a1 * a3 + a3 * a1
        w2_7 = a1 * a4 + a2 * a3 + a3 * a2 + a4 * a1
        w2_8 = a1 * a5 + a2 * a4 + a4 * a2 + a5 * a1
        w2_9 = a2 * a5 + a5 * a2
        w3_6 = w2_3 * a1
        w3_7 = w2_3 * a2 + w2_4 * a1
        w3_8 = w2_4 * a2 + w2_5 * a1
        w3_9 = w2_5 * a2
        out[m, 0] = cs[0, m]
        out[m, 1] = c1 * a1
        out[m, 2] = c1 * a2
        out[m, 3] = c1 * a3 + c2 * w2_3
        out[m, 4] = c1 * a4 + c2 * w2_4
        out[m, 5] = c1 * a5 + c2 * w2_5
        out[m, 6] = c1 * a6 + c2 * w2_6 + c3 * w3_6
        out[m, 7] = c1 * a7 + c2 * w2_7 + c3 * w3_7
        out[m, 8] = c1 * a8 + c2 * w2_8 + c3 * w3_8
        out[m, 9] = c1 * a9 + c2 * w2_9 + c3 * w3_9
        partial[m, 0] = ds[0, m]
        partial[m, 1] = d1 * a1
        partial[m, 2] = d1 * a2
        partial[m, 3] = d1 * a3 + d2 * w2_3
        partial[m, 4] = d1 * a4 + d2 * w2_4
        partial[m, 5] = d1 * a5 + d2 * w2_5
        partial[m, 6] = d1 * a6 + d2 * w2_6 + d3 * w3_6
        partial[m, 7] = d1 * a7 + d2 * w2_7 + d3 * w3_7
        partial[m, 8] = d1 * a8 + d2 * w2_8 + d3 * w3_8
        partial[m, 9] = d1 * a9 + d2 * w2_9 + d3 * w3_9

KERNELS = {
    (2, 1): {"mul": mul_2_1, "corr": corr_2_1, "compose": compose_2_1, "compose_pair": compose_pair_2_1},
    (2, 2): {"mul": mul_2_2, "corr": corr_2_2, "compose": compose_2_2, "compose_pair": compose_pair_2_2},
    (2, 3): {"mul": mul_2_3, "corr": corr_2_3, "compose": compose_2_3, "compose_pair": compose_pair_2_3},
}
