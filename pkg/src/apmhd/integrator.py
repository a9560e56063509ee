"""Semi-implicit time integration: the first-order step and the
multi-stage IMEX-RK driver, plus time-step control.

Each stage splits the dynamics into four pieces:
  * characteristic-wise sweep of the unit-Mach mass/momentum flux
    (its magnetic rows also serve the directly-evolved field
    components: all of B in 1D, Bz in 2D);
  * component-wise sweep of the Mach-scaled magnetic energy flux;
  * Hamilton-Jacobi advection of the vector potential (2D);
  * the semi-implicit piece: pressure-perturbation gradient in the
    momentum equation and enthalpy transport in the energy equation.
The implicit part of a stage reduces to one linear Helmholtz solve for
the pressure perturbation; for eps >= 1 the implicit pressure weight
vanishes and the stage assembles fully explicitly.

Stage values are cached so accumulation sums (and the weighted update
of non-stiffly-accurate pairs) reuse them without re-sweeping.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import elliptic, operators, weno
from .core import (
    DomainError,
    PositivityError,
    conserved_to_primitive,
    fill_az_ghosts,
    fill_ghosts,
    fill_scalar_ghosts,
    mean_pressure,
    pressure_from_conserved,
)
from .eigensystem import capped_fast_speed, max_signal_speed, true_fast_speed

DT_MAX = 0.1


@dataclass
class StepInfo:
    elliptic_solves: int = 0
    char_fallbacks: int = 0
    # last implicit stage's solved pressure data: the stage pressure is
    # pbar_last + eps^2 * p2_last (the quantity the low-Mach limit
    # bounds; None until a pressure stage has run)
    p2_last: object = None
    pbar_last: float = None


@dataclass
class StagePieces:
    """Cached stage right-hand-side values by component (interior)."""

    rho: np.ndarray
    qx: np.ndarray
    qy: np.ndarray
    qz: np.ndarray
    E: np.ndarray
    Bx: np.ndarray = None
    By: np.ndarray = None
    Bz: np.ndarray = None
    Az: np.ndarray = None


@dataclass
class StageWorkspace:
    """Per-step storage; stage i entries are written before any stage
    j > i reads them (the driver loop enforces the ordering)."""

    pieces: list = dc_field(default_factory=list)
    fields_E: list = dc_field(default_factory=list)


def _lift(prim, gamma):
    """Unit-Mach conserved 8-vector (rho, q, B, E1) from primitives."""
    kin = prim.rho * (prim.u**2 + prim.v**2 + prim.w**2)
    mag = prim.Bx**2 + prim.By**2 + prim.Bz**2
    e1 = prim.p / (gamma - 1.0) + 0.5 * (kin + mag)
    return np.stack([prim.rho, prim.rho * prim.u, prim.rho * prim.v,
                     prim.rho * prim.w, prim.Bx, prim.By, prim.Bz, e1])


def unit_mach_flux(prim, e1, p_mom, axis):
    """Flux of the unit-Mach system along ``axis`` with the momentum
    pressure replaced by ``p_mom`` (the switch-weighted pressure)."""
    rho, u, v, w = prim.rho, prim.u, prim.v, prim.w
    Bx, By, Bz = prim.Bx, prim.By, prim.Bz
    pt = p_mom + 0.5 * (Bx**2 + By**2 + Bz**2)
    udotb = u * Bx + v * By + w * Bz
    if axis == 0:
        return np.stack([
            rho * u,
            rho * u * u + pt - Bx * Bx,
            rho * u * v - Bx * By,
            rho * u * w - Bx * Bz,
            np.zeros_like(rho),
            u * By - v * Bx,
            u * Bz - w * Bx,
            (e1 + pt) * u - Bx * udotb,
        ])
    return np.stack([
        rho * v,
        rho * v * u - By * Bx,
        rho * v * v + pt - By * By,
        rho * v * w - By * Bz,
        v * Bx - u * By,
        np.zeros_like(rho),
        v * Bz - w * By,
        (e1 + pt) * v - By * udotb,
    ])


def magnetic_energy_flux(prim, params, axis):
    """Mach-scaled magnetic part of the energy flux,
    eps^2 (|B|^2 u/2 - (u.B) B), along ``axis``."""
    e2 = params.eps**2
    b2 = prim.Bx**2 + prim.By**2 + prim.Bz**2
    udotb = prim.u * prim.Bx + prim.v * prim.By + prim.w * prim.Bz
    un = (prim.u, prim.v)[axis]
    bn = (prim.Bx, prim.By)[axis]
    return e2 * (0.5 * b2 * un - udotb * bn)


def _lf_alphas(prim, params, grid):
    return tuple(max_signal_speed(prim, params, grid, ax) for ax in range(grid.dim))


def _char_divergence(prim, e1v, params, grid, alphas, info):
    """Characteristic-wise divergence of the unit-Mach flux, summed
    over axes; returns (8, interior)."""
    p_mom = params.pressure_alpha * prim.p
    total = None
    for ax in range(grid.dim):
        f = unit_mach_flux(prim, e1v[7], p_mom, ax)
        d, nb = weno.div_cw(e1v, f, alphas[ax], grid, ax, params.gamma)
        info.char_fallbacks += nb
        total = d if total is None else total + d
    return total


def _div_w_sum(flux_by_axis, var, alphas, grid):
    total = None
    for ax in range(grid.dim):
        d = weno.div_w(flux_by_axis[ax], var, alphas[ax], grid, ax)
        total = d if total is None else total + d
    return total


def _stage_explicit_pieces(field_e, grid, bc, params, info):
    """Everything of a stage that depends only on its explicit state."""
    ii = grid.interior
    prim = conserved_to_primitive(field_e, params)
    if np.any(prim.rho[ii] <= 0.0):
        raise PositivityError("stage density lost positivity")
    if np.any(prim.p[ii] <= 0.0):
        raise PositivityError("stage pressure lost positivity")
    alphas = _lf_alphas(prim, params, grid)
    e1v = _lift(prim, params.gamma)
    div_f1 = _char_divergence(prim, e1v, params, grid, alphas, info)
    f2 = [magnetic_energy_flux(prim, params, ax) for ax in range(grid.dim)]
    div_f2_E = _div_w_sum(f2, field_e.E, alphas, grid)
    hj = None
    if grid.dim == 2:
        hj = weno.hj_advection(field_e.Az, (prim.u, prim.v), grid)
    return {
        "field_E": field_e,
        "prim": prim,
        "alphas": alphas,
        "div_f1": div_f1,
        "div_f2_E": div_f2_E,
        "hj": hj,
        "pbar": mean_pressure(prim.p, grid),
    }


def _assemble_state(base, workspace, weights, dt, grid, bc, params):
    """U = base + dt sum_j weights[j] H^(j), ghost-filled, with the 2D
    in-plane field rederived from the potential."""
    out = base.copy()
    ii = grid.interior
    for j, wgt in enumerate(weights):
        if wgt == 0.0:
            continue
        pc = workspace.pieces[j]
        out.rho[ii] += dt * wgt * pc.rho
        out.qx[ii] += dt * wgt * pc.qx
        out.qy[ii] += dt * wgt * pc.qy
        out.qz[ii] += dt * wgt * pc.qz
        out.E[ii] += dt * wgt * pc.E
        out.Bz[ii] += dt * wgt * pc.Bz
        if grid.dim == 1:
            out.Bx[ii] += dt * wgt * pc.Bx
            out.By[ii] += dt * wgt * pc.By
        else:
            out.Az[ii] += dt * wgt * pc.Az
    if grid.dim == 2:
        fill_az_ghosts(out.Az, grid, bc)
        bx, by = operators.curl_to_b(out.Az, grid)
        out.Bx[ii] = bx[ii]
        out.By[ii] = by[ii]
    fill_ghosts(out, grid, bc)
    return out


def imex_stage_explicit(base, workspace, tableau, i, dt, grid, bc, params):
    """Stage state built from the cached values of earlier stages with
    the explicit tableau row (ghosts filled, 2D field from curl)."""
    return _assemble_state(base, workspace, tableau.A_exp[i, :i], dt, grid, bc, params)


def imex_stage_implicit(base, workspace, tableau, i, dt, grid, bc, params,
                        stage_data, info, elliptic_tol=1e-12):
    """Solve the implicit stage: direct density/potential updates, the
    pressure-perturbation Helmholtz solve (skipped when the implicit
    weight vanishes), momentum correction, and conservative energy
    update.  Returns (U_I^(i), StagePieces)."""
    g = params.gamma
    a_ii = float(tableau.A_imp[i, i])
    ii = grid.interior

    out = _assemble_state(base, workspace, tableau.A_imp[i, :i], dt, grid, bc, params)
    star_q = (out.qx[ii].copy(), out.qy[ii].copy(), out.qz[ii].copy())
    prim_E = stage_data["prim"]
    field_E = stage_data["field_E"]
    alphas = stage_data["alphas"]
    div_f1 = stage_data["div_f1"]
    pbar_E = stage_data["pbar"]

    out.rho[ii] -= dt * a_ii * div_f1[0]
    fill_scalar_ghosts(out.rho, grid, bc, "rho")
    if np.any(out.rho[ii] <= 0.0):
        raise PositivityError("implicit stage density lost positivity")

    if grid.dim == 1:
        out.Bx[ii] -= dt * a_ii * div_f1[4]
        out.By[ii] -= dt * a_ii * div_f1[5]
        out.Bz[ii] -= dt * a_ii * div_f1[6]
    else:
        out.Az[ii] -= dt * a_ii * stage_data["hj"]
        fill_az_ghosts(out.Az, grid, bc)
        bx, by = operators.curl_to_b(out.Az, grid)
        out.Bx[ii], out.By[ii] = bx[ii], by[ii]
        out.Bz[ii] -= dt * a_ii * div_f1[6]
    for name in ("Bx", "By", "Bz"):
        fill_scalar_ghosts(getattr(out, name), grid, bc, name)

    # momentum predictor and the partially updated energy
    out.qx[ii] = star_q[0] - dt * a_ii * div_f1[1]
    out.qy[ii] = star_q[1] - dt * a_ii * div_f1[2]
    out.qz[ii] = star_q[2] - dt * a_ii * div_f1[3]
    for name in ("qx", "qy", "qz"):
        fill_scalar_ghosts(getattr(out, name), grid, bc, name)
    e_ss = out.E[ii] - dt * a_ii * stage_data["div_f2_E"]
    out.E[ii] = e_ss
    fill_scalar_ghosts(out.E, grid, bc, "E")

    hbar = (field_E.E + prim_E.p) / out.rho
    if np.any(hbar[ii] <= 0.0):
        raise PositivityError("nonpositive stage enthalpy")

    gcoef = params.grad_coeff
    e2 = params.eps**2
    zeros_int = np.zeros(grid.shape)
    si_q = [zeros_int, zeros_int]

    if gcoef > 0.0:
        if a_ii > 0.0:
            flux_e = [hbar * (out.qx, out.qy)[ax] for ax in range(grid.dim)]
            e_circ = e_ss - dt * a_ii * _div_w_sum(flux_e, field_E.E, alphas, grid)
            kin_E = (prim_E.rho * (prim_E.u**2 + prim_E.v**2 + prim_E.w**2)
                     + prim_E.Bx**2 + prim_E.By**2 + prim_E.Bz**2)[ii]
            e_cc = e_circ - pbar_E / (g - 1.0) - 0.5 * e2 * kin_E
            prob = elliptic.HelmholtzProblem(
                hbar=hbar[ii],
                mass_weight=e2 / (g - 1.0),
                lap_weight=gcoef * (dt * a_ii) ** 2,
                rhs=e_cc,
            )
            p2 = elliptic.solve(prob, grid, tol=elliptic_tol)
            info.elliptic_solves += 1
            info.p2_last = p2
            info.pbar_last = pbar_E
            p2_full = grid.zeros()
            p2_full[ii] = p2
        elif params.eps > 0.0:
            # degenerate stage (zero diagonal): no solve exists, so the
            # perturbation is read off the stage state itself
            p_i = pressure_from_conserved(out.rho, out.qx, out.qy, out.qz,
                                          out.Bx, out.By, out.Bz, out.E, params)
            p2_full = (p_i - pbar_E) / e2
        else:
            p2_full = grid.zeros()
        fill_scalar_ghosts(p2_full, grid, bc, "rho")

        for ax in range(grid.dim):
            qpart = (out.qx, out.qy)[ax]
            si_q[ax] = gcoef * weno.div_w(p2_full, qpart, alphas[ax], grid, ax)
        out.qx[ii] -= dt * a_ii * si_q[0]
        if grid.dim == 2:
            out.qy[ii] -= dt * a_ii * si_q[1]
        for name in ("qx", "qy"):
            fill_scalar_ghosts(getattr(out, name), grid, bc, name)

    flux_e = [hbar * (out.qx, out.qy)[ax] for ax in range(grid.dim)]
    div_si_E = _div_w_sum(flux_e, field_E.E, alphas, grid)
    out.E[ii] = e_ss - dt * a_ii * div_si_E
    fill_scalar_ghosts(out.E, grid, bc, "E")

    pieces = StagePieces(
        rho=-div_f1[0],
        qx=-(div_f1[1] + si_q[0]),
        qy=-(div_f1[2] + si_q[1]),
        qz=-div_f1[3],
        E=-(stage_data["div_f2_E"] + div_si_E),
        Bx=-div_f1[4] if grid.dim == 1 else None,
        By=-div_f1[5] if grid.dim == 1 else None,
        Bz=-div_f1[6],
        Az=-stage_data["hj"] if grid.dim == 2 else None,
    )
    return out, pieces


def imex_step(field_c, grid, bc, params, tableau, dt, elliptic_tol=1e-12):
    """One full IMEX-RK step.  Returns (new field, StepInfo).

    Stiffly accurate pairs return the last implicit stage; otherwise
    the weighted sum over cached stage values is assembled."""
    info = StepInfo()
    ws = StageWorkspace()
    u_impl = None
    for i in range(tableau.stages):
        u_exp = imex_stage_explicit(field_c, ws, tableau, i, dt, grid, bc, params)
        stage_data = _stage_explicit_pieces(u_exp, grid, bc, params, info)
        u_impl, pieces = imex_stage_implicit(
            field_c, ws, tableau, i, dt, grid, bc, params, stage_data, info,
            elliptic_tol=elliptic_tol)
        ws.pieces.append(pieces)
        ws.fields_E.append(u_exp)

    if tableau.stiffly_accurate:
        out = u_impl
    else:
        if len(ws.pieces) != tableau.stages:
            raise RuntimeError("missing cached stage values for the weighted update")
        out = _assemble_state(field_c, ws, tableau.b_imp, dt, grid, bc, params)

    sl = grid.interior
    pressure_from_conserved(out.rho[sl], out.qx[sl], out.qy[sl], out.qz[sl],
                            out.Bx[sl], out.By[sl], out.Bz[sl], out.E[sl],
                            params, check_positive=True)
    return out, info


def si_first_order_step(field_c, grid, bc, params, dt, elliptic_tol=1e-12):
    """Standalone first-order semi-implicit step (the three-step flow),
    written directly rather than through the tableau machinery so the
    two paths can be cross-checked against each other."""
    g = params.gamma
    ii = grid.interior
    info = StepInfo()

    prim = conserved_to_primitive(field_c, params)
    alphas = _lf_alphas(prim, params, grid)
    e1v = _lift(prim, g)
    div_f1 = _char_divergence(prim, e1v, params, grid, alphas, info)
    p_n = prim.p
    pbar = mean_pressure(p_n, grid)

    out = field_c.copy()
    # step 1: density and magnetic update
    out.rho[ii] -= dt * div_f1[0]
    fill_scalar_ghosts(out.rho, grid, bc, "rho")
    if np.any(out.rho[ii] <= 0.0):
        raise PositivityError("first-order step density lost positivity")
    if grid.dim == 1:
        out.Bx[ii] -= dt * div_f1[4]
        out.By[ii] -= dt * div_f1[5]
        out.Bz[ii] -= dt * div_f1[6]
    else:
        hj = weno.hj_advection(field_c.Az, (prim.u, prim.v), grid)
        out.Az[ii] -= dt * hj
        fill_az_ghosts(out.Az, grid, bc)
        bx, by = operators.curl_to_b(out.Az, grid)
        out.Bx[ii], out.By[ii] = bx[ii], by[ii]
        out.Bz[ii] -= dt * div_f1[6]
    for name in ("Bx", "By", "Bz"):
        fill_scalar_ghosts(getattr(out, name), grid, bc, name)

    # step 2: momentum predictor, energy bookkeeping, pressure solve
    out.qx[ii] -= dt * div_f1[1]
    out.qy[ii] -= dt * div_f1[2]
    out.qz[ii] -= dt * div_f1[3]
    for name in ("qx", "qy", "qz"):
        fill_scalar_ghosts(getattr(out, name), grid, bc, name)

    f2 = [magnetic_energy_flux(prim, params, ax) for ax in range(grid.dim)]
    e_ss = field_c.E[ii] - dt * _div_w_sum(f2, field_c.E, alphas, grid)

    hbar = (field_c.E + p_n) / out.rho
    gcoef = params.grad_coeff
    e2 = params.eps**2

    if gcoef > 0.0:
        flux_e = [hbar * (out.qx, out.qy)[ax] for ax in range(grid.dim)]
        e_circ = e_ss - dt * _div_w_sum(flux_e, field_c.E, alphas, grid)
        kin = (prim.rho * (prim.u**2 + prim.v**2 + prim.w**2)
               + prim.Bx**2 + prim.By**2 + prim.Bz**2)[ii]
        e_cc = e_circ - pbar / (g - 1.0) - 0.5 * e2 * kin
        prob = elliptic.HelmholtzProblem(
            hbar=hbar[ii], mass_weight=e2 / (g - 1.0),
            lap_weight=gcoef * dt * dt, rhs=e_cc)
        p2 = elliptic.solve(prob, grid, tol=elliptic_tol)
        info.elliptic_solves += 1
        info.p2_last = p2
        info.pbar_last = pbar
        p2_full = grid.zeros()
        p2_full[ii] = p2
        fill_scalar_ghosts(p2_full, grid, bc, "rho")
        out.qx[ii] -= dt * gcoef * weno.div_w(p2_full, out.qx, alphas[0], grid, 0)
        if grid.dim == 2:
            out.qy[ii] -= dt * gcoef * weno.div_w(p2_full, out.qy, alphas[1], grid, 1)
        for name in ("qx", "qy"):
            fill_scalar_ghosts(getattr(out, name), grid, bc, name)

    # step 3: conservative energy update with the corrected momentum
    flux_e = [hbar * (out.qx, out.qy)[ax] for ax in range(grid.dim)]
    out.E[ii] = e_ss - dt * _div_w_sum(flux_e, field_c.E, alphas, grid)
    fill_scalar_ghosts(out.E, grid, bc, "E")

    pressure_from_conserved(out.rho[ii], out.qx[ii], out.qy[ii], out.qz[ii],
                            out.Bx[ii], out.By[ii], out.Bz[ii], out.E[ii],
                            params, check_positive=True)
    return out, info


def compute_dt(field_c, grid, params, cfl=0.25, dt_law="cfl", dt_max=DT_MAX,
               capped=True):
    """CFL time step from the current state.

    1D: dt = cfl h / max(|u| + c_fast); 2D: dt = cfl/(sx/hx + sy/hy).
    ``dt_law`` == "accuracy53" replaces h by h^(5/3) (both axes) for
    refinement studies.  ``capped=False`` uses the true fast speed
    (explicit reference schemes) and requires eps > 0.
    """
    if cfl <= 0.0:
        raise DomainError("cfl must be positive")
    if dt_law not in ("cfl", "accuracy53"):
        raise ValueError(f"unknown dt law {dt_law!r}")
    prim = conserved_to_primitive(field_c, params)
    sl = grid.interior
    expo = 5.0 / 3.0 if dt_law == "accuracy53" else 1.0

    denom = 0.0
    for ax in range(grid.dim):
        rho, p = prim.rho[sl], prim.p[sl]
        Bx, By, Bz = prim.Bx[sl], prim.By[sl], prim.Bz[sl]
        bn = (Bx, By)[ax]
        un = (prim.u, prim.v)[ax][sl]
        speed = capped_fast_speed if capped else true_fast_speed
        cf = speed(rho, p, Bx, By, Bz, bn, params)
        s = float(np.max(np.abs(un) + cf))
        denom += s / grid.dx[ax] ** expo
    if denom <= 0.0:
        return dt_max
    return min(cfl / denom, dt_max)
