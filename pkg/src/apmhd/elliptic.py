"""Assembly and solution of the linearized pressure-perturbation
Helmholtz equation solved at each implicit stage:

    m p2 - w div(hbar grad p2) = rhs,   m = eps^2/(gamma-1),
                                        w = dt^2 a_ii^2 (1 - alpha eps^2)

The variable-coefficient Laplacian is a conservative flux form with a
Richardson correction, (4 D_h - D_2h)/3: each of D_h and D_2h is a
symmetric negative semidefinite flux difference, the combination is
4th-order accurate and keeps the operator symmetric, so a conjugate
gradient iteration applies after projecting out the constant mode.
Periodic boundaries only; the degenerate w = 0 case reduces to a
pointwise scaling and never touches boundaries.
"""

from dataclasses import dataclass

import numpy as np


class EllipticError(RuntimeError):
    """Convergence failure; carries the final residual."""


@dataclass
class HelmholtzProblem:
    """Coefficient field hbar (> 0, interior shape), mass weight m,
    Laplacian weight w, right-hand side, and boundary tag."""

    hbar: np.ndarray
    mass_weight: float
    lap_weight: float
    rhs: np.ndarray
    bc: str = "periodic"

    def __post_init__(self):
        if np.any(self.hbar <= 0.0):
            raise ValueError("Helmholtz coefficient must be positive")
        if self.lap_weight < 0.0:
            raise ValueError("negative Laplacian weight")
        if self.bc != "periodic":
            raise NotImplementedError("only periodic pressure solves are supported")


def _flux_lap_axis(p, hbar, dx, axis):
    """(4 D_h - D_2h)/3 along one axis on periodic interior arrays."""
    hp = np.roll(hbar, -1, axis)  # h_{i+1}
    hm = np.roll(hbar, 1, axis)
    pp = np.roll(p, -1, axis)
    pm = np.roll(p, 1, axis)
    d_h = (0.5 * (hbar + hp) * (pp - p) - 0.5 * (hm + hbar) * (p - pm)) / dx**2

    hp2 = np.roll(hbar, -2, axis)
    hm2 = np.roll(hbar, 2, axis)
    pp2 = np.roll(p, -2, axis)
    pm2 = np.roll(p, 2, axis)
    d_2h = (0.5 * (hbar + hp2) * (pp2 - p) - 0.5 * (hm2 + hbar) * (p - pm2)) / (4.0 * dx**2)

    return (4.0 * d_h - d_2h) / 3.0


def variable_laplacian(p, hbar, grid):
    """div(hbar grad p) on periodic interior arrays, tensor sum of the
    per-axis operators."""
    out = _flux_lap_axis(p, hbar, grid.dx[0], 0)
    if grid.dim == 2:
        out = out + _flux_lap_axis(p, hbar, grid.dx[1], 1)
    return out


def assemble(problem, grid):
    """Matrix-free operator L[p] = m p - w div(hbar grad p)."""
    m, w, h = problem.mass_weight, problem.lap_weight, problem.hbar

    def op(p):
        out = m * p
        if w != 0.0:
            out = out - w * variable_laplacian(p, h, grid)
        return out

    return op


def _jacobi_diagonal(problem, grid):
    m, w, h = problem.mass_weight, problem.lap_weight, problem.hbar
    diag = np.full(h.shape, m)
    if w != 0.0:
        for axis in range(grid.dim):
            hp = np.roll(h, -1, axis)
            hm = np.roll(h, 1, axis)
            hp2 = np.roll(h, -2, axis)
            hm2 = np.roll(h, 2, axis)
            dh = 0.5 * (2.0 * h + hp + hm) / grid.dx[axis] ** 2
            d2h = 0.5 * (2.0 * h + hp2 + hm2) / (4.0 * grid.dx[axis] ** 2)
            diag = diag + w * (4.0 * dh - d2h) / 3.0
    return diag


def solve(problem, grid, tol=1e-12, max_iter=None):
    """Solve L p2 = rhs to ||L p2 - rhs||_inf <= tol ||rhs||_inf.

    The constant mode is handled exactly: its coefficient is rhs-mean/m
    for m > 0 and pinned to zero for m = 0 (the rhs mean is projected
    out either way, which is the periodic compatibility condition).
    Deterministic preconditioned CG on the mean-free complement.
    """
    m, w = problem.mass_weight, problem.lap_weight
    rhs = problem.rhs
    rhs_norm = float(np.max(np.abs(rhs)))
    if rhs_norm == 0.0:
        return np.zeros_like(rhs)
    if w == 0.0:
        if m == 0.0:
            raise EllipticError("degenerate solve: m = w = 0 with nonzero rhs")
        return rhs / m

    rbar = float(np.mean(rhs))
    const = rbar / m if m > 0.0 else 0.0
    b = rhs - rbar

    op = assemble(problem, grid)
    diag = _jacobi_diagonal(problem, grid)
    inv_diag = 1.0 / diag

    if max_iter is None:
        max_iter = 10 * b.size

    x = np.zeros_like(b)
    r = b.copy()
    z = inv_diag * r
    z -= np.mean(z)
    pvec = z.copy()
    rz = float(np.sum(r * z))

    target = tol * rhs_norm
    eps_mach = np.finfo(float).eps
    check_every = 32
    for it in range(1, max_iter + 1):
        ap = op(pvec)
        alpha = rz / float(np.sum(pvec * ap))
        x += alpha * pvec
        r -= alpha * ap
        if it % check_every == 0 or float(np.max(np.abs(r))) <= target:
            # recompute the true residual to sidestep recurrence drift;
            # accept at the roundoff floor of the residual evaluation
            r = b - op(x)
            floor = 32.0 * eps_mach * (
                float(np.max(diag)) * float(np.max(np.abs(x))) + rhs_norm)
            if float(np.max(np.abs(r))) <= max(target, floor):
                # the constant mode is solved exactly, so the full
                # residual equals the mean-free one
                return x + const
        z = inv_diag * r
        z -= np.mean(z)
        rz_new = float(np.sum(r * z))
        beta = rz_new / rz
        rz = rz_new
        pvec = z + beta * pvec

    raise EllipticError(
        f"pressure solve stalled after {max_iter} iterations; "
        f"residual {float(np.max(np.abs(b - op(x)))):.3e} vs target {target:.3e}")
