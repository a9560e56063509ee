"""Benchmark problems: initial conditions, exact solutions where they
exist, and boundary behaviour.

Periodic problems use vertex-style nodes (doubled grids nest exactly,
which the convergence studies rely on); wall-bounded problems use cell
centers so the wall falls between ghost and interior nodes.  In 2D the
in-plane magnetic field is always initialized as the discrete curl of
the vector potential, which keeps the discrete divergence at roundoff.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import operators
from .core import (
    BoundarySpec,
    ConservedField,
    EpsilonParams,
    Grid,
    eos_total_energy,
    fill_az_ghosts,
    fill_ghosts,
)

_REGISTRY = {}


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    bounds: tuple
    gamma: float
    eps: float
    t_final: float
    bc: BoundarySpec
    ic: callable  # (coords...) -> dict of primitive arrays (+ "Az" in 2D)
    exact: callable = None  # (coords..., t) -> same dict, or None
    centered: bool = False
    notes: str = ""

    def params(self, eps=None):
        return EpsilonParams(self.eps if eps is None else eps, self.gamma)


def _register(fn):
    _REGISTRY[fn.__name__.replace("_spec", "")] = fn
    return fn


def available_problems():
    return sorted(_REGISTRY)


def make_problem(name, eps=None):
    """Build a ProblemSpec by name; ``eps`` overrides the default Mach
    number (the constructors are eps-parametric)."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown problem {name!r}; known: {available_problems()}")
    spec = _REGISTRY[name](eps)
    return spec


def make_grid(spec, nx, ny=None):
    if spec.dim == 1:
        return Grid(shape=(nx,), bounds=spec.bounds, centered=spec.centered)
    return Grid(shape=(nx, ny if ny is not None else nx), bounds=spec.bounds,
                centered=spec.centered)


def initialize(spec, grid, eps=None):
    """Evaluate the initial condition on a grid and return a
    ghost-filled conserved field (2D in-plane B from the discrete
    curl of the potential)."""
    params = spec.params(eps)
    mesh = grid.mesh()
    prim = spec.ic(*mesh)
    field_c = ConservedField(grid)
    ii = grid.interior
    shape = np.broadcast_shapes(*(np.shape(v) for v in prim.values()))

    def full(name):
        arr = np.broadcast_to(np.asarray(prim[name], dtype=float), grid.shape)
        return arr

    rho, u, v, w, p = (full(k) for k in ("rho", "u", "v", "w", "p"))
    bz = full("Bz")
    field_c.rho[ii] = rho
    field_c.qx[ii] = rho * u
    field_c.qy[ii] = rho * v
    field_c.qz[ii] = rho * w
    field_c.Bz[ii] = bz

    if spec.dim == 2:
        field_c.Az[ii] = full("Az")
        fill_az_ghosts(field_c.Az, grid, spec.bc)
        bx_d, by_d = operators.curl_to_b(field_c.Az, grid)
        field_c.Bx[ii] = bx_d[ii]
        field_c.By[ii] = by_d[ii]
    else:
        field_c.Bx[ii] = full("Bx")
        field_c.By[ii] = full("By")

    field_c.E[ii] = eos_total_energy(
        rho, u, v, w, p,
        field_c.Bx[ii], field_c.By[ii], field_c.Bz[ii], params)
    fill_ghosts(field_c, grid, spec.bc)
    return field_c


# ----------------------------------------------------------------- 1D


@_register
def alfven1d_spec(eps=None):
    """Circularly polarized wave translating at unit speed toward -x."""

    def ic(x):
        s, c = np.sin(2 * np.pi * x), np.cos(2 * np.pi * x)
        return {"rho": np.ones_like(x), "u": np.zeros_like(x),
                "v": 0.1 * s, "w": 0.1 * c, "p": np.full_like(x, 0.1),
                "Bx": np.ones_like(x), "By": 0.1 * s, "Bz": 0.1 * c}

    def exact(x, t):
        return ic(x + t)

    return ProblemSpec(
        name="alfven1d", dim=1, bounds=((0.0, 1.0),), gamma=5.0 / 3.0,
        eps=1.0 if eps is None else eps, t_final=1.0,
        bc=BoundarySpec(kind=("periodic",)), ic=ic, exact=exact)


@_register
def eps_accuracy1d_spec(eps=None):
    """Mach-parametric well-prepared smooth data."""
    e = 1e-6 if eps is None else eps
    e2 = e * e
    gamma = 1.4

    def ic(x):
        s, c = np.sin(2 * np.pi * x), np.cos(2 * np.pi * x)
        rho = 1.0 + e2 * s * s
        return {"rho": rho, "u": e2 * s, "v": s + e2 * c, "w": np.zeros_like(x),
                "p": rho**gamma, "Bx": np.full_like(x, 0.5),
                "By": (1.0 + e2) * s, "Bz": (1.0 + e2) * c}

    return ProblemSpec(
        name="eps_accuracy1d", dim=1, bounds=((0.0, 1.0),), gamma=gamma,
        eps=e, t_final=0.05, bc=BoundarySpec(kind=("periodic",)), ic=ic)


@_register
def shock_tube_spec(eps=None):
    """Strong magnetosonic shock tube in the compressible regime."""

    def ic(x):
        left = x < 0.5
        rho = np.where(left, 1.0, 0.125)
        p = np.where(left, 1.0, 0.1)
        by = np.where(left, 1.0, -1.0)
        z = np.zeros_like(x)
        return {"rho": rho, "u": z, "v": z, "w": z, "p": p,
                "Bx": np.full_like(x, 0.75), "By": by, "Bz": z}

    return ProblemSpec(
        name="shock_tube", dim=1, bounds=((0.0, 1.0),), gamma=2.0,
        eps=1.0 if eps is None else eps, t_final=0.1,
        bc=BoundarySpec(kind=("reflective",)), ic=ic, centered=True,
        notes="reflective walls; waves stay interior up to the final time")


# ----------------------------------------------------------------- 2D

_THETA = math.pi / 4.0


@_register
def alfven2d_spec(eps=None):
    """The translating wave rotated by theta = pi/4; the potential is
    linear plus periodic, so its halo uses the shifted-periodic fill."""
    ct, st = math.cos(_THETA), math.sin(_THETA)
    lx, ly = 1.0 / ct, 1.0 / st

    def fields(xi):
        s, c = np.sin(2 * np.pi * xi), np.cos(2 * np.pi * xi)
        u1, u2, u3 = np.zeros_like(xi), 0.1 * s, 0.1 * c
        b1, b2, b3 = np.ones_like(xi), 0.1 * s, 0.1 * c
        return u1, u2, u3, b1, b2, b3

    def ic(x, y, t=0.0):
        xi = x * ct + y * st + t
        u1, u2, u3, b1, b2, b3 = fields(xi)
        eta = -x * st + y * ct
        az = eta + 0.1 * np.cos(2 * np.pi * xi) / (2 * np.pi)
        return {"rho": np.ones_like(xi),
                "u": u1 * ct - u2 * st, "v": u1 * st + u2 * ct, "w": u3,
                "p": np.full_like(xi, 0.1),
                "Bx": b1 * ct - b2 * st, "By": b1 * st + b2 * ct, "Bz": b3,
                "Az": az}

    def exact(x, y, t):
        return ic(x, y, t)

    return ProblemSpec(
        name="alfven2d", dim=2, bounds=((0.0, lx), (0.0, ly)), gamma=5.0 / 3.0,
        eps=1.0 if eps is None else eps, t_final=1.0,
        bc=BoundarySpec(kind=("periodic", "periodic"), az_kind="shift",
                        az_shift=(-st * lx, ct * ly)),
        ic=ic, exact=exact)


@_register
def eps_accuracy2d_spec(eps=None):
    """2D Mach-parametric well-prepared smooth data."""
    e = 1e-6 if eps is None else eps
    e2 = e * e
    gamma = 1.4
    isq = 1.0 / math.sqrt(2.0)

    def ic(x, y):
        sp = np.sin(2 * np.pi * (x + y))
        cp = np.cos(2 * np.pi * (x + y))
        sm = np.sin(2 * np.pi * (x - y))
        rho = 1.0 + e2 * sp * sp
        return {"rho": rho, "u": sm + e2 * sp, "v": sm + e2 * cp,
                "w": np.zeros_like(x), "p": rho**gamma,
                "Bx": -isq * sp, "By": isq * sp, "Bz": cp,
                "Az": cp / (2.0 * math.sqrt(2.0) * np.pi)}

    return ProblemSpec(
        name="eps_accuracy2d", dim=2, bounds=((0.0, 1.0), (0.0, 1.0)),
        gamma=gamma, eps=e, t_final=0.01,
        bc=BoundarySpec(kind=("periodic", "periodic")), ic=ic)


@_register
def orszag_tang_spec(eps=None):
    gamma = 5.0 / 3.0

    def ic(x, y):
        z = np.zeros_like(x)
        return {"rho": np.full_like(x, gamma**2), "u": -np.sin(y),
                "v": np.sin(x), "w": z, "p": np.full_like(x, gamma),
                "Bx": -np.sin(y), "By": np.sin(2 * x), "Bz": z,
                "Az": 0.5 * np.cos(2 * x) + np.cos(y)}

    return ProblemSpec(
        name="orszag_tang", dim=2, bounds=((0.0, 2 * np.pi), (0.0, 2 * np.pi)),
        gamma=gamma, eps=1.0 if eps is None else eps, t_final=2.0,
        bc=BoundarySpec(kind=("periodic", "periodic")), ic=ic)


@_register
def blast_wave_spec(eps=None):
    """Pressure-jump blast in a strong oblique field."""
    b0 = 10.0
    st, ct = math.sin(_THETA), math.cos(_THETA)

    def ic(x, y):
        r = np.sqrt(x * x + y * y)
        p = np.where(r <= 0.125, 100.0, 10.0)
        z = np.zeros_like(x)
        return {"rho": np.ones_like(x), "u": z, "v": z, "w": z, "p": p,
                "Bx": np.full_like(x, b0 * st), "By": np.full_like(x, b0 * ct),
                "Bz": z, "Az": 5.0 * math.sqrt(2.0) * (-x + y)}

    return ProblemSpec(
        name="blast_wave", dim=2, bounds=((-0.5, 0.5), (-0.5, 0.5)),
        gamma=5.0 / 3.0, eps=0.9 if eps is None else eps, t_final=0.02,
        bc=BoundarySpec(kind=("periodic", "periodic"), az_kind="extrapolate"),
        ic=ic)


@_register
def field_loop_spec(eps=None):
    """Weak magnetic loop advected diagonally; tests tangential
    discontinuity transport."""
    v0 = 1.0
    ct0, st0 = -2.0 / math.sqrt(5.0), 1.0 / math.sqrt(5.0)

    def ic(x, y):
        r = np.sqrt(x * x + y * y)
        az = np.where(r <= 0.3, 1e-3 * (0.3 - r), 0.0)
        z = np.zeros_like(x)
        return {"rho": np.ones_like(x), "u": np.full_like(x, v0 * ct0),
                "v": np.full_like(x, v0 * st0), "w": z,
                "p": np.ones_like(x), "Bx": z, "By": z, "Bz": z, "Az": az}

    return ProblemSpec(
        name="field_loop", dim=2, bounds=((-1.0, 1.0), (-0.5, 0.5)),
        gamma=5.0 / 3.0, eps=0.1 if eps is None else eps,
        t_final=math.sqrt(5.0),
        bc=BoundarySpec(kind=("periodic", "periodic")), ic=ic)


@_register
def kelvin_helmholtz_spec(eps=None):
    """Magnetized shear layer in the low-Mach regime."""
    gamma = 1.4

    def eta(y):
        out = np.zeros_like(y)
        lo = (y >= -9.0 / 32.0) & (y <= -7.0 / 32.0)
        mid = (y > -7.0 / 32.0) & (y < 7.0 / 32.0)
        hi = (y >= 7.0 / 32.0) & (y <= 9.0 / 32.0)
        out = np.where(lo, 0.5 * (1.0 + np.sin(16 * np.pi * (y + 0.25))), out)
        out = np.where(mid, 1.0, out)
        out = np.where(hi, 0.5 * (1.0 - np.sin(16 * np.pi * (y - 0.25))), out)
        return out

    def ic(x, y):
        z = np.zeros_like(x)
        return {"rho": np.full_like(x, gamma), "u": 1.0 - 2.0 * eta(y),
                "v": 0.1 * np.sin(2 * np.pi * x), "w": z,
                "p": np.ones_like(x), "Bx": np.full_like(x, 0.1), "By": z,
                "Bz": z, "Az": 0.1 * y}

    return ProblemSpec(
        name="kelvin_helmholtz", dim=2, bounds=((0.0, 2.0), (-0.5, 0.5)),
        gamma=gamma, eps=1e-6 if eps is None else eps, t_final=0.8,
        bc=BoundarySpec(kind=("periodic", "periodic"), az_kind="extrapolate"),
        ic=ic)


def exact_solution(spec, grid, t, eps=None):
    """Conserved field of the exact solution at time t (translating
    problems only).  The magnetic components are the analytic ones, not
    the potential curl."""
    if spec.exact is None:
        raise ValueError(f"problem {spec.name!r} has no exact solution")
    params = spec.params(eps)
    mesh = grid.mesh()
    prim = spec.exact(*mesh, t)
    out = ConservedField(grid)
    ii = grid.interior
    rho = np.asarray(prim["rho"], dtype=float)
    out.rho[ii] = rho
    out.qx[ii] = rho * prim["u"]
    out.qy[ii] = rho * prim["v"]
    out.qz[ii] = rho * prim["w"]
    out.Bx[ii] = prim["Bx"]
    out.By[ii] = prim["By"]
    out.Bz[ii] = prim["Bz"]
    out.E[ii] = eos_total_energy(rho, prim["u"], prim["v"], prim["w"],
                                 prim["p"], prim["Bx"], prim["By"],
                                 prim["Bz"], params)
    if spec.dim == 2 and "Az" in prim:
        out.Az[ii] = prim["Az"]
    fill_ghosts(out, grid, spec.bc)
    return out


def apply_boundary(field_c, spec, grid):
    """Fill every halo of a conserved field per the problem's rules."""
    return fill_ghosts(field_c, grid, spec.bc)
