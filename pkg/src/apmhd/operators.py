"""Central-difference utilities, constrained-transport curl, and the
discrete divergence monitor.

All stencils here are the 5-point 4th-order centered first derivative.
The divergence monitor reuses exactly the same stencil as the curl, so
div(curl Az) vanishes identically (up to roundoff) on periodic grids:
the discrete operators commute.
"""

import numpy as np


def _shift(arr, k, axis):
    """arr shifted so result[i] = arr[i + k] (valid on the halo interior)."""
    return np.roll(arr, -k, axis=axis)


def central_d4(v, dx, axis=0):
    """4th-order centered first derivative of a full (haloed) array.

    d/dx v |_i = (-v_{i+2} + 8 v_{i+1} - 8 v_{i-1} + v_{i-2}) / (12 dx)

    Ghost nodes must be filled to depth >= 2; the result is valid on
    nodes at least 2 away from the array edge (everywhere in the
    interior for ghost width >= 2).
    """
    return (
        -_shift(v, 2, axis) + 8.0 * _shift(v, 1, axis)
        - 8.0 * _shift(v, -1, axis) + _shift(v, -2, axis)
    ) / (12.0 * dx)


def curl_to_b(az, grid):
    """In-plane field from the scalar potential: Bx = d(Az)/dy,
    By = -d(Az)/dx, via the 4th-order centered stencil.

    Returns full arrays whose interior is valid; halos must be refilled
    by the caller's boundary handling.
    """
    dx, dy = grid.dx
    bx = central_d4(az, dy, axis=1)
    by = -central_d4(az, dx, axis=0)
    return bx, by


def div_b_monitor(bx, by, grid):
    """Max over interior nodes of |D4x Bx + D4y By|.

    Uses the same D4 stencil as curl_to_b, so fields derived from a
    potential report machine-level divergence on periodic grids.
    """
    dx, dy = grid.dx
    div = central_d4(bx, dx, axis=0) + central_d4(by, dy, axis=1)
    return float(np.max(np.abs(div[grid.interior])))
