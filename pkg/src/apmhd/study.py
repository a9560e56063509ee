"""Convergence-study driver: runs a resolution ladder, measures error
norms against an exact solution or a nested fine-grid reference, and
reports observed orders."""

import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import problems
from .driver import RunConfig, run

VARIABLES = ("rho", "qx", "qy", "qz", "Bx", "By", "Bz", "E")


@dataclass
class ErrorReport:
    variable: str
    resolutions: list
    l1: list = dc_field(default_factory=list)
    l2: list = dc_field(default_factory=list)
    linf: list = dc_field(default_factory=list)

    def orders(self, norm="l1"):
        """log2(e_coarse / e_fine) per doubled-resolution pair."""
        errs = getattr(self, norm)
        out = []
        for i in range(1, len(errs)):
            ratio = self.resolutions[i] / self.resolutions[i - 1]
            if errs[i] == 0.0 or errs[i - 1] == 0.0:
                out.append(float("nan"))
            else:
                out.append(float(np.log(errs[i - 1] / errs[i])
                                 / np.log(ratio)))
        return out


def _norms(err):
    flat = np.asarray(err).ravel()
    return (float(np.mean(np.abs(flat))),
            float(np.sqrt(np.mean(flat**2))),
            float(np.max(np.abs(flat))))


def _restrict(arr, stride):
    if arr.ndim == 1:
        return arr[::stride]
    return arr[::stride, ::stride]


def convergence_study(base_config, resolutions, reference="exact",
                      variables=VARIABLES, outdir=None):
    """Run each resolution and compare against the reference.

    ``reference`` is "exact" (problems with a translating solution) or
    an integer fine resolution; fine grids must nest on the coarse
    ones (vertex-style nodes, resolutions dividing evenly).
    Returns {variable: ErrorReport}.
    """
    spec = problems.make_problem(base_config.problem, eps=base_config.epsilon)

    ref_fields = {}
    if reference != "exact":
        ref_n = int(reference)
        for n in resolutions:
            if ref_n % n != 0:
                raise ValueError(
                    f"reference grid {ref_n} does not nest on {n}")
            if spec.centered:
                raise ValueError("fine-grid reference needs vertex-style nodes")
        cfg = _with_resolution(base_config, ref_n, spec)
        res = run(cfg)
        ref_fields["field"] = res.field
        ref_fields["grid"] = res.grid

    reports = {v: ErrorReport(variable=v, resolutions=list(resolutions))
               for v in variables}

    for n in resolutions:
        cfg = _with_resolution(base_config, n, spec)
        res = run(cfg)
        ii = res.grid.interior
        if reference == "exact":
            exact = problems.exact_solution(spec, res.grid, res.t,
                                            eps=base_config.epsilon)
            for v in variables:
                err = getattr(res.field, v)[ii] - getattr(exact, v)[ii]
                l1, l2, li = _norms(err)
                reports[v].l1.append(l1)
                reports[v].l2.append(l2)
                reports[v].linf.append(li)
        else:
            stride = int(reference) // n
            rg = ref_fields["grid"].interior
            for v in variables:
                fine = _restrict(getattr(ref_fields["field"], v)[rg], stride)
                err = getattr(res.field, v)[ii] - fine
                l1, l2, li = _norms(err)
                reports[v].l1.append(l1)
                reports[v].l2.append(l2)
                reports[v].linf.append(li)

    if outdir:
        os.makedirs(outdir, exist_ok=True)
        write_report_table(reports, os.path.join(outdir, "convergence.csv"))
        from . import plots
        plots.render_convergence_figure(reports, outdir)
    return reports


def _with_resolution(cfg, n, spec):
    ny = n if spec.dim == 2 else None
    return RunConfig(
        problem=cfg.problem, scheme=cfg.scheme, tableau=cfg.tableau,
        nx=n, ny=ny, cfl=cfg.cfl, epsilon=cfg.epsilon, t_final=cfg.t_final,
        dt_law=cfg.dt_law, outdir=None, dump_every=0,
        elliptic_tol=cfg.elliptic_tol, plots=False, dt_max=cfg.dt_max)


def write_report_table(reports, path):
    with open(path, "w", newline="\n") as fh:
        fh.write("variable,N,L1,L1_order,L2,L2_order,Linf,Linf_order\n")
        for v, rep in reports.items():
            o1 = [""] + [f"{x:.2f}" for x in rep.orders("l1")]
            o2 = [""] + [f"{x:.2f}" for x in rep.orders("l2")]
            oi = [""] + [f"{x:.2f}" for x in rep.orders("linf")]
            for k, n in enumerate(rep.resolutions):
                fh.write(f"{v},{n},{rep.l1[k]:.6e},{o1[k]},"
                         f"{rep.l2[k]:.6e},{o2[k]},"
                         f"{rep.linf[k]:.6e},{oi[k]}\n")
    return path


def format_report(reports, norm="l1"):
    lines = []
    for v, rep in reports.items():
        errs = getattr(rep, norm)
        orders = [""] + [f"{x:5.2f}" for x in rep.orders(norm)]
        lines.append(f"-- {v} ({norm.upper()}) --")
        for k, n in enumerate(rep.resolutions):
            lines.append(f"  N={n:5d}  err={errs[k]:.4e}  order={orders[k]}")
    return "\n".join(lines)
