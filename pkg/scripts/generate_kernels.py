"""Regenerate src/pinnjet/_unrolled.py, the unrolled jet kernels.

The generic kernels in pinnjet._kernels walk precomputed index-triple
tables, which costs a table load per term and keeps nothing in registers.
For the fixed 2-input spaces that dominate training time it pays to emit
one specialized kernel per space with the convolution written out term by
term: each row's coefficients load once, every index is a compile-time
constant, and numba caches the compiled result on disk.

Accumulation order per output slot follows the triple-table enumeration
(outer factor index major), so each kernel is deterministic run to run.

Usage, from the repository root:

    python3 scripts/generate_kernels.py
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from pinnjet.jets import multi_indices  # noqa: E402

SPACES = [(2, 1), (2, 2), (2, 3)]

HEADER = '''"""Unrolled jet kernels for the 2-input spaces (orders 1..3).

Generated by scripts/generate_kernels.py; edit that script, not this file.
Each kernel mirrors its generic counterpart in pinnjet._kernels with the
index-triple loops expanded to straight-line code, keeping per-row
coefficients in registers.  Per-slot accumulation order matches the triple
enumeration, so results are deterministic.  fastmath stays off.
"""

from numba import njit

'''


def _tables(dims, order):
    mi = multi_indices(dims, order)
    index = {m: i for i, m in enumerate(mi)}
    trip = []
    for i, a in enumerate(mi):
        for j, b in enumerate(mi):
            k = index.get(tuple(x + y for x, y in zip(a, b)))
            if k is not None:
                trip.append((i, j, k))
    deg = [sum(m) for m in mi]
    pow_trip = [(i, j, k) for i, j, k in trip if deg[i] >= 1 and deg[j] >= 1]
    return mi, deg, trip, pow_trip


def _grouped(trip, dest_pos):
    groups: dict[int, list] = {}
    for t in trip:
        groups.setdefault(t[dest_pos], []).append(t)
    return groups


def _loads(var, count, indent):
    cols = [f"{var}{i} = {var}[m, {i}]" for i in range(count)]
    lines = []
    for start in range(0, count, 4):
        lines.append(indent + "; ".join(cols[start:start + 4]))
    return lines


def gen_mul(dims, order):
    # Assign semantics: writes every slot, so callers pass uninitialized
    # output (unlike the accumulate-mode generic mul_acc).
    mi, _, trip, _ = _tables(dims, order)
    n = len(mi)
    name = f"mul_{dims}_{order}"
    lines = [
        "@njit(cache=True)",
        f"def {name}(x, y, z):",
        "    for m in range(x.shape[0]):",
    ]
    lines += _loads("x", n, "        ")
    lines += _loads("y", n, "        ")
    for k, ts in sorted(_grouped(trip, 2).items()):
        terms = " + ".join(f"x{i} * y{j}" for i, j, _ in ts)
        lines.append(f"        z[m, {k}] = {terms}")
    return name, "\n".join(lines) + "\n"


def gen_corr(dims, order):
    # target[i] += sum_j g[i + j] * p[j]: the adjoint of a jet product,
    # enumerated as the (i, j, k) table read back as (dest=i, g=k, p=j).
    mi, _, trip, _ = _tables(dims, order)
    n = len(mi)
    name = f"corr_{dims}_{order}"
    lines = [
        "@njit(cache=True)",
        f"def {name}(g, p, z):",
        "    for m in range(g.shape[0]):",
    ]
    lines += _loads("g", n, "        ")
    lines += _loads("p", n, "        ")
    for dest, ts in sorted(_grouped(trip, 0).items()):
        terms = " + ".join(f"g{k} * p{j}" for _, j, k in ts)
        lines.append(f"        z[m, {dest}] += {terms}")
    return name, "\n".join(lines) + "\n"


def _power_exprs(mi, deg, pow_trip):
    """Expression strings for w^2 and w^3 slots, w = input minus constant."""
    w2 = {}
    for k, ts in sorted(_grouped(pow_trip, 2).items()):
        w2[k] = " + ".join(f"a{i} * a{j}" for i, j, _ in ts)
    w3 = {}
    cubic = [(i, j, k) for i, j, k in pow_trip if deg[i] >= 2]
    for k, ts in sorted(_grouped(cubic, 2).items()):
        w3[k] = " + ".join(f"w2_{i} * a{j}" for i, j, _ in ts)
    return w2, w3


def _compose_body(dims, order, with_partial):
    mi, deg, _, pow_trip = _tables(dims, order)
    n = len(mi)
    w2, w3 = _power_exprs(mi, deg, pow_trip)
    # constant coefficient a0 is never read; load slots 1..n-1 only
    cols = [f"a{i} = a[m, {i}]" for i in range(1, n)]
    lines = ["    for m in range(a.shape[0]):"]
    for start in range(0, len(cols), 4):
        lines.append("        " + "; ".join(cols[start:start + 4]))
    for q in range(1, order + 1):
        lines.append(f"        c{q} = cs[{q}, m]")
    if with_partial:
        for q in range(1, order + 1):
            lines.append(f"        d{q} = ds[{q}, m]")
    if order >= 2:
        for k in sorted(w2):
            lines.append(f"        w2_{k} = {w2[k]}")
    if order >= 3:
        for k in sorted(w3):
            lines.append(f"        w3_{k} = {w3[k]}")
    def emit(outname, prefix, zero_col):
        lines.append(f"        {outname}[m, 0] = {zero_col}[0, m]")
        for k in range(1, n):
            expr = f"{prefix}1 * a{k}"
            if order >= 2 and k in w2:
                expr += f" + {prefix}2 * w2_{k}"
            if order >= 3 and k in w3:
                expr += f" + {prefix}3 * w3_{k}"
            lines.append(f"        {outname}[m, {k}] = {expr}")
    emit("out", "c", "cs")
    if with_partial:
        emit("partial", "d", "ds")
    return "\n".join(lines) + "\n"


def gen_compose(dims, order):
    name = f"compose_{dims}_{order}"
    head = f"@njit(cache=True)\ndef {name}(a, cs, out):\n"
    return name, head + _compose_body(dims, order, with_partial=False)


def gen_compose_pair(dims, order):
    name = f"compose_pair_{dims}_{order}"
    head = f"@njit(cache=True)\ndef {name}(a, cs, ds, out, partial):\n"
    return name, head + _compose_body(dims, order, with_partial=True)


def main():
    chunks = [HEADER]
    registry = {}
    for dims, order in SPACES:
        names = {}
        for kind, gen in [("mul", gen_mul), ("corr", gen_corr),
                          ("compose", gen_compose),
                          ("compose_pair", gen_compose_pair)]:
            name, src = gen(dims, order)
            names[kind] = name
            chunks.append(src)
        registry[(dims, order)] = names
    entries = []
    for key, names in registry.items():
        fields = ", ".join(f'"{kind}": {fn}' for kind, fn in names.items())
        entries.append(f"    {key}: {{{fields}}},")
    chunks.append("KERNELS = {\n" + "\n".join(entries) + "\n}\n")
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "pinnjet" / "_unrolled.py"
    out.write_text("\n".join(chunks))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
