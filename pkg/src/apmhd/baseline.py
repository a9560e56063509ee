"""Explicit SSP-RK3 + WENO5 reference solvers.

"ERK" evolves the full Mach-scaled system with direct magnetic field
updates (1D and plain 2D); "ERKC" additionally advects the vector
potential and rederives the in-plane field from its curl each stage.
Every spatial kernel is shared with the semi-implicit scheme, so the
two integrators differ only in the time discretization.  The
Lax-Friedrichs dissipation uses the same Mach-capped signal speeds;
only the time step uses the true fast speed (stability requires it).
"""

import numpy as np

from . import operators, weno
from .core import (
    PositivityError,
    conserved_to_primitive,
    fill_az_ghosts,
    fill_ghosts,
    pressure_from_conserved,
)
from .integrator import _lf_alphas, _lift


def mach_scaled_flux(prim, E, params, axis):
    """Flux of the Mach-scaled system along ``axis`` (momentum carries
    p/eps^2; the magnetic energy terms carry eps^2)."""
    e2 = params.eps**2
    rho, u, v, w = prim.rho, prim.u, prim.v, prim.w
    Bx, By, Bz = prim.Bx, prim.By, prim.Bz
    pt = prim.p / e2 + 0.5 * (Bx**2 + By**2 + Bz**2)
    et = E + prim.p + 0.5 * e2 * (Bx**2 + By**2 + Bz**2)
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
            et * u - e2 * Bx * udotb,
        ])
    return np.stack([
        rho * v,
        rho * v * u - By * Bx,
        rho * v * v + pt - By * By,
        rho * v * w - By * Bz,
        v * Bx - u * By,
        np.zeros_like(rho),
        v * Bz - w * By,
        et * v - e2 * By * udotb,
    ])


def erk_rhs(field_c, grid, bc, params):
    """Explicit right-hand side: minus the characteristic-wise flux
    divergence of the full system, (8, interior)."""
    if params.eps <= 0.0:
        raise PositivityError("explicit reference scheme undefined at eps = 0")
    prim = conserved_to_primitive(field_c, params)
    ii = grid.interior
    if np.any(prim.rho[ii] <= 0.0) or np.any(prim.p[ii] <= 0.0):
        raise PositivityError("explicit stage lost positivity")
    alphas = _lf_alphas(prim, params, grid)
    vstate = field_c.as_vector()
    vbasis = _lift(prim, params.gamma)
    total = None
    for ax in range(grid.dim):
        f = mach_scaled_flux(prim, field_c.E, params, ax)
        d, _ = weno.div_cw(vstate, f, alphas[ax], grid, ax, params.gamma,
                           vbasis=vbasis)
        total = d if total is None else total + d
    return -total


def _euler_substep(field_c, grid, bc, params, dt, with_ct):
    rhs = erk_rhs(field_c, grid, bc, params)
    out = field_c.copy()
    ii = grid.interior
    for k, name in enumerate(("rho", "qx", "qy", "qz", "Bx", "By", "Bz", "E")):
        getattr(out, name)[ii] += dt * rhs[k]
    if with_ct:
        if grid.dim != 2:
            raise ValueError("constrained transport applies to 2D runs")
        prim = conserved_to_primitive(field_c, params)
        hj = weno.hj_advection(field_c.Az, (prim.u, prim.v), grid)
        out.Az[ii] = field_c.Az[ii] - dt * hj
        fill_az_ghosts(out.Az, grid, bc)
        bx, by = operators.curl_to_b(out.Az, grid)
        out.Bx[ii], out.By[ii] = bx[ii], by[ii]
    fill_ghosts(out, grid, bc)
    return out


def _blend(a, b, wa, wb, grid):
    """wa*a + wb*b on every component, ghost-refilled by the caller."""
    out = a.copy()
    for name in out.components():
        arr_a, arr_b = getattr(a, name), getattr(b, name)
        getattr(out, name)[...] = wa * arr_a + wb * arr_b
    return out


def ssp_rk3_step(field_c, grid, bc, params, dt, with_ct=False):
    """Three-stage strong-stability-preserving RK3 step."""
    u1 = _euler_substep(field_c, grid, bc, params, dt, with_ct)
    u2 = _blend(field_c, _euler_substep(u1, grid, bc, params, dt, with_ct),
                0.75, 0.25, grid)
    fill_ghosts(u2, grid, bc)
    if with_ct:
        fill_az_ghosts(u2.Az, grid, bc)
        ii = grid.interior
        bx, by = operators.curl_to_b(u2.Az, grid)
        u2.Bx[ii], u2.By[ii] = bx[ii], by[ii]
        fill_ghosts(u2, grid, bc)
    out = _blend(field_c, _euler_substep(u2, grid, bc, params, dt, with_ct),
                 1.0 / 3.0, 2.0 / 3.0, grid)
    fill_ghosts(out, grid, bc)
    if with_ct:
        fill_az_ghosts(out.Az, grid, bc)
        ii = grid.interior
        bx, by = operators.curl_to_b(out.Az, grid)
        out.Bx[ii], out.By[ii] = bx[ii], by[ii]
        fill_ghosts(out, grid, bc)

    sl = grid.interior
    pressure_from_conserved(out.rho[sl], out.qx[sl], out.qy[sl], out.qz[sl],
                            out.Bx[sl], out.By[sl], out.Bz[sl], out.E[sl],
                            params, check_positive=True)
    return out
