"""Figure rendering for run reports: profile plots in 1D, contour maps
in 2D, and log-log convergence charts, written as PNG files next to
the delimited output."""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import conserved_to_primitive


def render_run_figures(field_c, grid, params, spec, outdir):
    """Final-state figures; returns the written paths."""
    ii = grid.interior
    prim = conserved_to_primitive(field_c, params)
    paths = []
    if grid.dim == 1:
        x = grid.coords(0)
        fig, axes = plt.subplots(2, 2, figsize=(9, 6), constrained_layout=True)
        for ax, (label, data) in zip(axes.ravel(), [
                ("density", field_c.rho[ii]),
                ("pressure", prim.p[ii]),
                ("By", field_c.By[ii]),
                ("u", prim.u[ii])]):
            ax.plot(x, data, "-", lw=1.0)
            ax.set_xlabel("x")
            ax.set_ylabel(label)
        fig.suptitle(f"{spec.name} (N={grid.shape[0]})")
        path = os.path.join(outdir, "fields_final.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    else:
        X, Y = grid.mesh()
        mag_p = 0.5 * (field_c.Bx[ii]**2 + field_c.By[ii]**2 + field_c.Bz[ii]**2)
        fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), constrained_layout=True)
        for ax, (label, data) in zip(axes, [
                ("density", field_c.rho[ii]),
                ("magnetic pressure", mag_p)]):
            cs = ax.contourf(X, Y, data, levels=35, cmap="viridis")
            fig.colorbar(cs, ax=ax, shrink=0.9)
            ax.set_title(label)
            ax.set_xlabel("x")
            ax.set_ylabel("y")
            ax.set_aspect("equal")
        fig.suptitle(f"{spec.name} ({grid.shape[0]}x{grid.shape[1]})")
        path = os.path.join(outdir, "fields_final.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths


def render_convergence_figure(reports, outdir):
    fig, ax = plt.subplots(figsize=(6, 4.5), constrained_layout=True)
    drew = False
    for v, rep in reports.items():
        errs = np.asarray(rep.l1)
        if np.all(errs > 0.0):
            ax.loglog(rep.resolutions, errs, "o-", label=v)
            drew = True
    if drew:
        n = np.asarray(reports[next(iter(reports))].resolutions, dtype=float)
        ref = None
        for v, rep in reports.items():
            if all(e > 0 for e in rep.l1):
                ref = rep.l1[0] * (n[0] / n) ** 5
                break
        if ref is not None:
            ax.loglog(n, ref, "k--", lw=0.8, label="5th order")
        ax.legend(fontsize=8)
    ax.set_xlabel("N")
    ax.set_ylabel("L1 error")
    path = os.path.join(outdir, "convergence.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
