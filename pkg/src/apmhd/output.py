"""Structured text output: field dumps, per-step diagnostics, and the
run summary.  Dumps are CSV with a header row, one row per node in
row-major x-fastest order, every value printed with 17 significant
digits so a reload reproduces the doubles bitwise."""

import numpy as np

from . import operators
from .core import conserved_to_primitive

FMT = "%.17g"


def _fmt(x):
    return FMT % float(x)


def field_table(field_c, grid, params, spec):
    """(column names, column arrays) for a dump, flattened x-fastest."""
    ii = grid.interior
    prim = conserved_to_primitive(field_c, params)
    mesh = grid.mesh()

    cols = []
    if grid.dim == 1:
        cols.append(("x", mesh[0]))
    else:
        X, Y = mesh
        cols.append(("x", X))
        cols.append(("y", Y))
    cols += [
        ("rho", field_c.rho[ii]),
        ("u", prim.u[ii]), ("v", prim.v[ii]), ("w", prim.w[ii]),
        ("Bx", field_c.Bx[ii]), ("By", field_c.By[ii]), ("Bz", field_c.Bz[ii]),
        ("p", prim.p[ii]), ("E", field_c.E[ii]),
    ]
    if grid.dim == 2:
        dx, dy = grid.dx
        div = (operators.central_d4(field_c.Bx, dx, 0)
               + operators.central_d4(field_c.By, dy, 1))[ii]
        vort = (operators.central_d4(prim.v, dx, 0)
                - operators.central_d4(prim.u, dy, 1))[ii]
        ma = np.sqrt(prim.u[ii]**2 + prim.v[ii]**2) / np.sqrt(
            params.gamma * prim.p[ii] / prim.rho[ii])
        ma_max = float(np.max(ma))
        m_ratio = ma / ma_max if ma_max > 0.0 else np.zeros_like(ma)
        cols += [("Az", field_c.Az[ii]), ("divB", div),
                 ("vorticity", vort), ("M_ratio", m_ratio)]

    names = [n for n, _ in cols]
    if grid.dim == 1:
        arrays = [np.asarray(a) for _, a in cols]
    else:
        # x-fastest: transpose the (nx, ny) arrays before raveling
        arrays = [np.asarray(a).T.ravel() for _, a in cols]
    return names, arrays


def emit_fields(field_c, grid, params, spec, path):
    names, arrays = field_table(field_c, grid, params, spec)
    n = arrays[0].size
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(a[i]) for a in arrays) + "\n")
    return path


def load_fields(path):
    """Reload a dump into a dict of 1D column arrays."""
    with open(path) as fh:
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {n: data[:, k] for k, n in enumerate(names)}


def write_diagnostics(records, path):
    keys = list(records[0].keys())
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(keys) + "\n")
        for rec in records:
            fh.write(",".join(
                str(rec[k]) if isinstance(rec[k], int) else _fmt(rec[k])
                for k in keys) + "\n")
    return path


def write_summary(summary, path):
    with open(path, "w", newline="\n") as fh:
        for k, v in summary.items():
            if isinstance(v, float):
                fh.write(f"{k} = {_fmt(v)}\n")
            else:
                fh.write(f"{k} = {v}\n")
    return path
