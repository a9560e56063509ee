"""Grids, state containers, equation of state, and runtime parameters.

State is stored structure-of-arrays: one full ndarray (interior plus a
ghost halo of width ``ghost``) per scalar component, so stencil sweeps
stay contiguous.  All operations here are pure; ghost filling writes
only the halo.
"""

from dataclasses import dataclass

import numpy as np

GHOST = 3  # WENO5 interface stencils span i-2..i+3


class DomainError(ValueError):
    """Raised when a physical precondition (rho > 0, p > 0, ...) fails."""


class PositivityError(RuntimeError):
    """Raised when an evolved state loses density or pressure positivity."""


@dataclass(frozen=True)
class EpsilonParams:
    """Sonic Mach number eps, specific heat ratio, and the implicit
    pressure weight.

    ``pressure_alpha`` is 1 for eps < 1 and 1/eps^2 otherwise, so
    ``pressure_alpha * eps**2 <= 1`` always, with equality for eps >= 1
    (the fully explicit regime).  eps = 0 is admissible and means the
    exact incompressible limit.
    """

    eps: float
    gamma: float = 5.0 / 3.0

    def __post_init__(self):
        if self.eps < 0.0:
            raise DomainError(f"eps must be >= 0, got {self.eps}")
        if self.gamma <= 1.0:
            raise DomainError(f"gamma must be > 1, got {self.gamma}")

    @property
    def pressure_alpha(self):
        return 1.0 if self.eps < 1.0 else 1.0 / self.eps**2

    @property
    def grad_coeff(self):
        """Weight of the implicit pressure-perturbation gradient,
        1 - pressure_alpha * eps^2 (zero for eps >= 1)."""
        return 1.0 - self.pressure_alpha * self.eps**2


@dataclass(frozen=True)
class Grid:
    """Uniform structured grid, 1D or 2D.

    ``shape`` counts interior nodes per axis.  Nodes are either vertex
    style, x_i = xmin + i*dx (periodic problems; doubled grids nest), or
    cell centered, x_i = xmin + (i + 1/2)*dx (wall/extrapolation
    problems; the boundary then falls between ghost and interior).
    """

    shape: tuple
    bounds: tuple  # ((xmin, xmax), [(ymin, ymax)])
    ghost: int = GHOST
    centered: bool = False

    def __post_init__(self):
        if len(self.shape) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if len(self.bounds) != len(self.shape):
            raise ValueError("bounds/shape dimension mismatch")
        if self.ghost < GHOST:
            raise ValueError(f"ghost width must be >= {GHOST}")
        for n, (lo, hi) in zip(self.shape, self.bounds):
            if n < 1 or hi <= lo:
                raise ValueError("need positive node count and extent")

    @property
    def dim(self):
        return len(self.shape)

    @property
    def dx(self):
        """Spacing per axis, dx_k = (max - min)/N_k."""
        return tuple((hi - lo) / n for n, (lo, hi) in zip(self.shape, self.bounds))

    @property
    def full_shape(self):
        return tuple(n + 2 * self.ghost for n in self.shape)

    @property
    def interior(self):
        """Slices selecting interior nodes of a full (haloed) array."""
        return tuple(slice(self.ghost, self.ghost + n) for n in self.shape)

    def coords(self, axis):
        """Interior node coordinates along ``axis``."""
        n = self.shape[axis]
        lo, _ = self.bounds[axis]
        h = self.dx[axis]
        off = 0.5 if self.centered else 0.0
        return lo + (np.arange(n) + off) * h

    def mesh(self):
        """Interior coordinate arrays, broadcastable to interior shape."""
        axes = [self.coords(k) for k in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def zeros(self):
        return np.zeros(self.full_shape)

    @property
    def cell_volume(self):
        v = 1.0
        for h in self.dx:
            v *= h
        return v

    @property
    def n_interior(self):
        n = 1
        for k in self.shape:
            n *= k
        return n


# Conserved component names; Az is appended in 2D.
CONS_NAMES = ("rho", "qx", "qy", "qz", "Bx", "By", "Bz", "E")

# Parity of each component under reflection about a wall normal to x / y.
# +1 mirrors, -1 negates (normal velocity and tangential magnetic field).
_REFLECT_PARITY = {
    0: {"rho": 1, "qx": -1, "qy": 1, "qz": 1, "Bx": 1, "By": -1, "Bz": -1, "E": 1, "Az": 1},
    1: {"rho": 1, "qx": 1, "qy": -1, "qz": 1, "Bx": -1, "By": 1, "Bz": -1, "E": 1, "Az": 1},
}


class ConservedField:
    """Structure-of-arrays conserved state (rho, q, B, E) on a grid.

    In 2D the scalar vector potential Az is carried as well and the
    in-plane field (Bx, By) is by construction the discrete curl of Az.
    Arrays include the ghost halo.
    """

    __slots__ = ("rho", "qx", "qy", "qz", "Bx", "By", "Bz", "E", "Az", "dim")

    def __init__(self, grid_or_dim):
        if isinstance(grid_or_dim, Grid):
            dim = grid_or_dim.dim
            make = grid_or_dim.zeros
        else:
            dim = grid_or_dim
            make = None
        self.dim = dim
        for name in CONS_NAMES:
            setattr(self, name, make() if make else None)
        self.Az = (make() if make else None) if dim == 2 else None

    def components(self):
        names = list(CONS_NAMES)
        if self.dim == 2:
            names.append("Az")
        return names

    def copy(self):
        out = ConservedField(self.dim)
        for name in self.components():
            setattr(out, name, getattr(self, name).copy())
        return out

    def as_vector(self):
        """The 8 MHD components stacked along axis 0 (no Az)."""
        return np.stack([getattr(self, n) for n in CONS_NAMES])


class PrimitiveField:
    """Structure-of-arrays primitive state (rho, u, p, B)."""

    __slots__ = ("rho", "u", "v", "w", "p", "Bx", "By", "Bz")

    def __init__(self):
        for name in self.__slots__:
            setattr(self, name, None)


def eos_total_energy(rho, u, v, w, p, Bx, By, Bz, params):
    """Total energy E = p/(gamma-1) + (eps^2/2)(rho |u|^2 + |B|^2)."""
    if np.any(np.asarray(rho) <= 0.0):
        raise DomainError("eos_total_energy: nonpositive density")
    e2 = params.eps**2
    kin = rho * (u * u + v * v + w * w)
    mag = Bx * Bx + By * By + Bz * Bz
    return p / (params.gamma - 1.0) + 0.5 * e2 * (kin + mag)


def pressure_from_conserved(rho, qx, qy, qz, Bx, By, Bz, E, params, check_positive=False):
    """Invert the EOS: p = (gamma-1)[E - (eps^2/2)(|q|^2/rho + |B|^2)].

    With ``check_positive`` a nonpositive result raises PositivityError
    (reported, never silently clamped).
    """
    if np.any(np.asarray(rho) <= 0.0):
        raise DomainError("pressure_from_conserved: nonpositive density")
    e2 = params.eps**2
    kin = (qx * qx + qy * qy + qz * qz) / rho
    mag = Bx * Bx + By * By + Bz * Bz
    p = (params.gamma - 1.0) * (E - 0.5 * e2 * (kin + mag))
    if check_positive and np.any(p <= 0.0):
        raise PositivityError(
            f"pressure positivity failure: min p = {np.min(p):.6e}"
        )
    return p


def conserved_to_primitive(field, params):
    """Pointwise conserved -> primitive conversion (on full arrays)."""
    prim = PrimitiveField()
    prim.rho = field.rho
    prim.u = field.qx / field.rho
    prim.v = field.qy / field.rho
    prim.w = field.qz / field.rho
    prim.Bx, prim.By, prim.Bz = field.Bx, field.By, field.Bz
    prim.p = pressure_from_conserved(
        field.rho, field.qx, field.qy, field.qz,
        field.Bx, field.By, field.Bz, field.E, params,
    )
    return prim


def primitive_to_conserved(prim, params, dim=1):
    """Pointwise primitive -> conserved conversion."""
    out = ConservedField(dim)
    out.rho = np.array(prim.rho, dtype=float, copy=True)
    out.qx = prim.rho * prim.u
    out.qy = prim.rho * prim.v
    out.qz = prim.rho * prim.w
    out.Bx = np.array(prim.Bx, dtype=float, copy=True)
    out.By = np.array(prim.By, dtype=float, copy=True)
    out.Bz = np.array(prim.Bz, dtype=float, copy=True)
    out.E = eos_total_energy(prim.rho, prim.u, prim.v, prim.w, prim.p,
                             prim.Bx, prim.By, prim.Bz, params)
    return out


def mean_pressure(p, grid):
    """Arithmetic average of interior nodal values.

    On the uniform periodic grids used here this equals the midpoint
    quadrature of the domain mean.
    """
    return float(np.mean(p[grid.interior]))


@dataclass(frozen=True)
class BoundarySpec:
    """Per-run boundary behaviour.

    ``kind`` applies per axis to all conserved components: "periodic" or
    "reflective".  The vector potential may deviate: "periodic",
    "extrapolate" (first-order linear extension), or "shift"
    (periodic up to a fixed increment per period, exact for potentials
    that are linear plus periodic).
    """

    kind: tuple = ("periodic",)
    az_kind: str = "periodic"
    az_shift: tuple = (0.0, 0.0)


def _fill_axis_periodic(arr, g, axis):
    n = arr.shape[axis] - 2 * g
    idx = [slice(None)] * arr.ndim

    def sl(a, b):
        idx[axis] = slice(a, b)
        return tuple(idx)

    arr[sl(0, g)] = arr[sl(n, n + g)]
    arr[sl(n + g, n + 2 * g)] = arr[sl(g, 2 * g)]


def _fill_axis_reflective(arr, g, axis, parity):
    n = arr.shape[axis] - 2 * g
    if n < g:
        raise ValueError("reflective fill needs at least ghost-width interior nodes")
    idx = [slice(None)] * arr.ndim

    def sl(a, b, step=None):
        idx[axis] = slice(a, b, step)
        return tuple(idx)

    # wall lies between ghost and interior: ghost g-1-k mirrors interior g+k
    arr[sl(g - 1, None, -1)] = parity * arr[sl(g, 2 * g)]
    arr[sl(n + g, n + 2 * g)] = parity * arr[sl(n + g - 1, n - 1, -1)]


def _fill_axis_extrapolate(arr, g, axis):
    n = arr.shape[axis] - 2 * g
    idx = [slice(None)] * arr.ndim

    def sl(i):
        idx[axis] = i
        return tuple(idx)

    for k in range(1, g + 1):
        arr[sl(g - k)] = (k + 1) * arr[sl(g)] - k * arr[sl(g + 1)]
        arr[sl(n + g - 1 + k)] = (k + 1) * arr[sl(n + g - 1)] - k * arr[sl(n + g - 2)]


def _fill_axis_shift(arr, g, axis, shift):
    _fill_axis_periodic(arr, g, axis)
    n = arr.shape[axis] - 2 * g
    idx = [slice(None)] * arr.ndim

    def sl(a, b):
        idx[axis] = slice(a, b)
        return tuple(idx)

    arr[sl(0, g)] -= shift
    arr[sl(n + g, n + 2 * g)] += shift


def fill_scalar_ghosts(arr, grid, bc, name="rho"):
    """Fill the halo of one component in place; interior is untouched."""
    g = grid.ghost
    for axis in range(grid.dim):
        kind = bc.kind[axis]
        if kind == "periodic":
            _fill_axis_periodic(arr, g, axis)
        elif kind == "reflective":
            _fill_axis_reflective(arr, g, axis, _REFLECT_PARITY[axis][name])
        else:
            raise ValueError(f"unknown boundary kind {kind!r}")
    return arr


def fill_az_ghosts(az, grid, bc):
    """Fill the vector-potential halo according to its own rule."""
    g = grid.ghost
    for axis in range(grid.dim):
        if bc.az_kind == "periodic":
            _fill_axis_periodic(az, g, axis)
        elif bc.az_kind == "extrapolate":
            _fill_axis_extrapolate(az, g, axis)
        elif bc.az_kind == "shift":
            _fill_axis_shift(az, g, axis, bc.az_shift[axis])
        else:
            raise ValueError(f"unknown Az boundary kind {bc.az_kind!r}")
    return az


def fill_ghosts(field, grid, bc):
    """Fill halos of every conserved component (and Az in 2D)."""
    for name in CONS_NAMES:
        fill_scalar_ghosts(getattr(field, name), grid, bc, name)
    if field.dim == 2 and field.Az is not None:
        fill_az_ghosts(field.Az, grid, bc)
    return field
