"""Run orchestration: configuration, the time loop, per-step
diagnostics, and output emission."""

import logging
import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import baseline, integrator, operators, output, problems
from .core import PositivityError, conserved_to_primitive
from .elliptic import EllipticError
from .tableaux import load_tableau

log = logging.getLogger(__name__)


class SolverFailure(RuntimeError):
    """A step was rejected; carries the step index and diagnostics."""


@dataclass
class RunConfig:
    problem: str
    scheme: str = "imex"  # imex | erk | erkc
    tableau: str = "third_order_sa"
    nx: int = 64
    ny: int = None
    cfl: float = 0.25
    epsilon: float = None  # None: problem default
    t_final: float = None  # None: problem default
    dt_law: str = "cfl"    # cfl | accuracy53
    outdir: str = None
    dump_every: int = 0    # 0: final state only
    elliptic_tol: float = 1e-12
    plots: bool = True
    dt_max: float = integrator.DT_MAX

    def __post_init__(self):
        if self.scheme not in ("imex", "erk", "erkc"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.nx <= 0 or (self.ny is not None and self.ny <= 0):
            raise ValueError("resolutions must be positive")


@dataclass
class RunResult:
    config: RunConfig
    spec: object
    grid: object
    field: object
    t: float
    steps: int
    diagnostics: list = dc_field(default_factory=list)
    summary: dict = dc_field(default_factory=dict)
    outdir: str = None


def _diagnose(field_c, grid, params, spec, t, dt, step):
    ii = grid.interior
    prim = conserved_to_primitive(field_c, params)
    rec = {
        "step": step,
        "t": t,
        "dt": dt,
        "mass": float(np.sum(field_c.rho[ii])) * grid.cell_volume,
        "min_rho": float(np.min(field_c.rho[ii])),
        "min_p": float(np.min(prim.p[ii])),
    }
    if grid.dim == 2:
        rec["divb_max"] = operators.div_b_monitor(field_c.Bx, field_c.By, grid)
    return rec


def run(config):
    """Time-step a problem to its final time; emit field dumps, a
    diagnostics table, a summary, and figures when an output directory
    is configured.  Deterministic for a fixed configuration."""
    spec = problems.make_problem(config.problem, eps=config.epsilon)
    params = spec.params(config.epsilon)
    grid = problems.make_grid(spec, config.nx, config.ny)
    field_c = problems.initialize(spec, grid, eps=config.epsilon)
    t_final = spec.t_final if config.t_final is None else config.t_final

    tab = load_tableau(config.tableau) if config.scheme == "imex" else None
    capped = config.scheme == "imex"

    outdir = config.outdir
    if outdir:
        os.makedirs(outdir, exist_ok=True)

    t = 0.0
    step = 0
    diagnostics = [_diagnose(field_c, grid, params, spec, t, 0.0, 0)]
    max_divb = diagnostics[0].get("divb_max", 0.0)
    min_rho = diagnostics[0]["min_rho"]
    min_p = diagnostics[0]["min_p"]
    mass0 = diagnostics[0]["mass"]

    while t < t_final - 1e-14:
        dt = integrator.compute_dt(field_c, grid, params, cfl=config.cfl,
                                   dt_law=config.dt_law, dt_max=config.dt_max,
                                   capped=capped)
        dt = min(dt, t_final - t)
        try:
            if config.scheme == "imex":
                field_c, _ = integrator.imex_step(
                    field_c, grid, spec.bc, params, tab, dt,
                    elliptic_tol=config.elliptic_tol)
            else:
                field_c = baseline.ssp_rk3_step(
                    field_c, grid, spec.bc, params, dt,
                    with_ct=(config.scheme == "erkc"))
        except (PositivityError, EllipticError) as exc:
            raise SolverFailure(
                f"step {step + 1} at t={t:.6g} rejected: {exc}") from exc
        t += dt
        step += 1
        rec = _diagnose(field_c, grid, params, spec, t, dt, step)
        diagnostics.append(rec)
        max_divb = max(max_divb, rec.get("divb_max", 0.0))
        min_rho = min(min_rho, rec["min_rho"])
        min_p = min(min_p, rec["min_p"])
        if outdir and config.dump_every and step % config.dump_every == 0:
            output.emit_fields(field_c, grid, params, spec,
                               os.path.join(outdir, f"fields_{step:06d}.csv"))

    summary = {
        "problem": spec.name,
        "scheme": config.scheme,
        "nx": config.nx,
        "ny": config.ny if grid.dim == 2 else "",
        "epsilon": params.eps,
        "t_final": t,
        "steps": step,
        "mass_initial": mass0,
        "mass_final": diagnostics[-1]["mass"],
        "mass_drift_rel": abs(diagnostics[-1]["mass"] - mass0) / abs(mass0),
        "min_rho": min_rho,
        "min_p": min_p,
    }
    if grid.dim == 2:
        summary["max_divb"] = max_divb

    if outdir:
        output.emit_fields(field_c, grid, params, spec,
                           os.path.join(outdir, "fields_final.csv"))
        output.write_diagnostics(diagnostics,
                                 os.path.join(outdir, "diagnostics.csv"))
        output.write_summary(summary, os.path.join(outdir, "summary.txt"))
        if config.plots:
            from . import plots
            plots.render_run_figures(field_c, grid, params, spec, outdir)

    return RunResult(config=config, spec=spec, grid=grid, field=field_c,
                     t=t, steps=step, diagnostics=diagnostics,
                     summary=summary, outdir=outdir)
