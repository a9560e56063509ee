"""MHD wave speeds, Mach-capped signal speeds, and the characteristic
eigenvector basis for the flux Jacobian along a sweep axis.

The basis follows the classical degeneracy-safe normalization
(alpha_f/alpha_s magnetosonic weights, beta tangential projections,
limit branches at the triple point and vanishing tangential field).
The decomposition is always formed from the state interpreted with the
unit-Mach equation of state; seven waves come from the reduced system
that treats the sweep-normal field component as a parameter, and the
eighth (zero-speed) column is either the exact kernel of the full
Jacobian (public API, finite-difference verifiable) or the trivial
unit vector (robust choice used inside sweeps, where the normal-field
row carries no flux).
"""

from dataclasses import dataclass

import numpy as np

from .core import DomainError

# small-discriminant thresholds for degenerate branches
DEGEN_EPS = 1e-12


@dataclass(frozen=True)
class WaveSpeeds:
    sound: float
    alfven: float
    fast: float
    slow: float


@dataclass(frozen=True)
class EigenBasis:
    """Right/left eigenvector matrices and eigenvalues, sorted ascending."""

    R: np.ndarray
    L: np.ndarray
    D: np.ndarray


def _speeds(a2, rho, Bx, By, Bz):
    b2 = (Bx * Bx + By * By + Bz * Bz) / rho
    ca2 = (Bx * Bx) / rho
    tot = a2 + b2
    disc = np.sqrt(np.maximum(tot * tot - 4.0 * a2 * ca2, 0.0))
    cf2 = 0.5 * (tot + disc)
    cs2 = 0.5 * np.maximum(tot - disc, 0.0)
    return np.sqrt(a2), np.sqrt(ca2), np.sqrt(cf2), np.sqrt(cs2)


def _normal_components(u, v, w, Bx, By, Bz, n):
    nx, ny, nz = n
    if abs(nx * nx + ny * ny + nz * nz - 1.0) > 1e-12:
        raise DomainError("normal direction must be a unit vector")
    un = u * nx + v * ny + w * nz
    Bn = Bx * nx + By * ny + Bz * nz
    return un, Bn


def wave_speeds(rho, u, v, w, p, Bx, By, Bz, params, n=(1.0, 0.0, 0.0)):
    """Sound/Alfven/fast/slow speeds of the dimensionless system along n.

    The sound speed is a = sqrt(gamma p / rho)/eps, so eps must be
    positive here; use capped_wave_speeds for the limit regime.
    """
    if params.eps <= 0.0:
        raise DomainError("wave_speeds undefined at eps = 0; use capped_wave_speeds")
    if np.any(np.asarray(rho) <= 0.0) or np.any(np.asarray(p) <= 0.0):
        raise DomainError("wave_speeds needs rho > 0 and p > 0")
    _, Bn = _normal_components(u, v, w, Bx, By, Bz, n)
    a2 = params.gamma * p / rho / params.eps**2
    a, ca, cf, cs = _speeds(a2, rho, Bn, *_tangential(Bx, By, Bz, Bn, n))
    return WaveSpeeds(float(a), float(ca), float(cf), float(cs))


def _tangential(Bx, By, Bz, Bn, n):
    # only |B_t|^2 matters for the quadratic; reconstruct two components
    bt2 = Bx * Bx + By * By + Bz * Bz - Bn * Bn
    bt2 = np.maximum(bt2, 0.0)
    return np.sqrt(bt2), np.zeros_like(np.asarray(bt2, dtype=float))


def capped_wave_speeds(rho, u, v, w, p, Bx, By, Bz, params, n=(1.0, 0.0, 0.0)):
    """Wave speeds with the Mach-capped sound speed
    a_hat = min(1/eps, 1) sqrt(gamma p / rho); defined for eps >= 0."""
    if np.any(np.asarray(rho) <= 0.0) or np.any(np.asarray(p) <= 0.0):
        raise DomainError("capped_wave_speeds needs rho > 0 and p > 0")
    _, Bn = _normal_components(u, v, w, Bx, By, Bz, n)
    cap = min(1.0 / params.eps, 1.0) if params.eps > 0.0 else 1.0
    a2 = (cap**2) * params.gamma * p / rho
    a, ca, cf, cs = _speeds(a2, rho, Bn, *_tangential(Bx, By, Bz, Bn, n))
    return WaveSpeeds(float(a), float(ca), float(cf), float(cs))


def capped_fast_speed(rho, p, Bx, By, Bz, bn, params):
    """Array-valued capped fast speed along a coordinate axis; ``bn`` is
    the normal component array (one of Bx/By)."""
    cap = min(1.0 / params.eps, 1.0) if params.eps > 0.0 else 1.0
    a2 = (cap**2) * params.gamma * p / rho
    _, _, cf, _ = _speeds(a2, rho, bn, np.sqrt(np.maximum(
        Bx * Bx + By * By + Bz * Bz - bn * bn, 0.0)), 0.0)
    return cf


def true_fast_speed(rho, p, Bx, By, Bz, bn, params):
    """Array-valued fast speed of the dimensionless system (sound speed
    scales as 1/eps); requires eps > 0."""
    if params.eps <= 0.0:
        raise DomainError("true fast speed undefined at eps = 0")
    a2 = params.gamma * p / rho / params.eps**2
    _, _, cf, _ = _speeds(a2, rho, bn, np.sqrt(np.maximum(
        Bx * Bx + By * By + Bz * Bz - bn * bn, 0.0)), 0.0)
    return cf


def max_signal_speed(prim, params, grid, axis):
    """max over interior nodes of |u_axis| + capped fast speed along axis."""
    sl = grid.interior
    rho, p = prim.rho[sl], prim.p[sl]
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise DomainError("max_signal_speed needs an admissible field")
    Bx, By, Bz = prim.Bx[sl], prim.By[sl], prim.Bz[sl]
    un = (prim.u, prim.v)[axis][sl]
    bn = (Bx, By)[axis]
    cf = capped_fast_speed(rho, p, Bx, By, Bz, bn, params)
    return float(np.max(np.abs(un) + cf))


def sweep_permutation(axis):
    """Component permutation mapping (rho,qx,qy,qz,Bx,By,Bz,E) into the
    sweep frame (rho,qn,qt1,qt2,Bn,Bt1,Bt2,E); cyclic, right-handed."""
    if axis == 0:
        return np.array([0, 1, 2, 3, 4, 5, 6, 7])
    if axis == 1:
        return np.array([0, 2, 3, 1, 5, 6, 4, 7])
    raise ValueError("axis must be 0 or 1")


def _alpha_beta(a2, ca2, cf2, cs2, Bt1, Bt2, Bn):
    """Degeneracy-safe magnetosonic weights and tangential projections."""
    bt = np.sqrt(Bt1 * Bt1 + Bt2 * Bt2)
    small_bt = bt < DEGEN_EPS
    inv_bt = np.where(small_bt, 0.0, 1.0 / np.where(small_bt, 1.0, bt))
    isq = 1.0 / np.sqrt(2.0)
    beta1 = np.where(small_bt, isq, Bt1 * inv_bt)
    beta2 = np.where(small_bt, isq, Bt2 * inv_bt)

    dcf = cf2 - cs2
    degen = dcf <= DEGEN_EPS * np.maximum(a2, 1e-300)
    safe = np.where(degen, 1.0, dcf)
    af2 = np.clip((a2 - cs2) / safe, 0.0, 1.0)
    as2 = np.clip((cf2 - a2) / safe, 0.0, 1.0)
    alpha_f = np.where(degen, 1.0, np.sqrt(af2))
    alpha_s = np.where(degen, 0.0, np.sqrt(as2))

    sgn = np.where(Bn >= 0.0, 1.0, -1.0)
    return alpha_f, alpha_s, beta1, beta2, sgn


def _primitive_wave_basis(rho, un, ut1, ut2, p, Bn, Bt1, Bt2, gamma):
    """Seven-wave right/left eigenvectors of the reduced quasilinear
    primitive system, stacked as (..., 7var, 7wave) / (..., 7wave, 7var).

    Variable order (rho, un, ut1, ut2, Bt1, Bt2, p); wave order
    (f-, a-, s-, e, s+, a+, f+).
    """
    a2 = gamma * p / rho
    sq = np.sqrt(rho)
    _, ca, cf, cs = _speeds(a2, rho, Bn, np.sqrt(Bt1**2 + Bt2**2), 0.0)
    a = np.sqrt(a2)
    ca2, cf2, cs2 = ca * ca, cf * cf, cs * cs
    af, as_, b1, b2, sgn = _alpha_beta(a2, ca2, cf2, cs2, Bt1, Bt2, Bn)

    shp = np.broadcast(rho, un, p, Bn).shape
    z = np.zeros(shp)

    def col(*entries):
        return np.stack(np.broadcast_arrays(*entries), axis=-1)

    rf = lambda pm: col(rho * af, pm * af * cf, -pm * as_ * cs * b1 * sgn,
                        -pm * as_ * cs * b2 * sgn, as_ * sq * a * b1,
                        as_ * sq * a * b2, af * rho * a2)
    rs = lambda pm: col(rho * as_, pm * as_ * cs, pm * af * cf * b1 * sgn,
                        pm * af * cf * b2 * sgn, -af * sq * a * b1,
                        -af * sq * a * b2, as_ * rho * a2)
    ra = lambda pm: col(z, z, -b2, b1, pm * sgn * sq * b2, -pm * sgn * sq * b1, z)
    re = col(1.0 + z, z, z, z, z, z, z)

    R = np.stack([rf(-1.0), ra(-1.0), rs(-1.0), re, rs(1.0), ra(1.0), rf(1.0)], axis=-1)

    i2a2 = 1.0 / (2.0 * a2)
    lf = lambda pm: col(z, pm * af * cf * i2a2, -pm * as_ * cs * sgn * b1 * i2a2,
                        -pm * as_ * cs * sgn * b2 * i2a2, as_ * a * b1 / sq * i2a2,
                        as_ * a * b2 / sq * i2a2, af / rho * i2a2)
    ls = lambda pm: col(z, pm * as_ * cs * i2a2, pm * af * cf * sgn * b1 * i2a2,
                        pm * af * cf * sgn * b2 * i2a2, -af * a * b1 / sq * i2a2,
                        -af * a * b2 / sq * i2a2, as_ / rho * i2a2)
    la = lambda pm: col(z, z, -0.5 * b2, 0.5 * b1, pm * 0.5 * sgn * b2 / sq,
                        -pm * 0.5 * sgn * b1 / sq, z)
    le = col(1.0 + z, z, z, z, z, z, -1.0 / a2)

    L = np.stack([lf(-1.0), la(-1.0), ls(-1.0), le, ls(1.0), la(1.0), lf(1.0)], axis=-2)

    lam = np.stack([un - cf, un - ca, un - cs, un, un + cs, un + ca, un + cf], axis=-1)
    return R, L, lam, (a, ca, cf, cs)


def _kernel_column(rho, un, ut1, ut2, p, Bn, Bt1, Bt2, gamma, speeds):
    """Exact zero-speed kernel of the full flux Jacobian, as primitive
    perturbations (drho, dun, dut1, dut2, dBt1, dBt2, dp) normalized to
    a unit normal-field perturbation; NaN where the kernel is resonant
    or ill-conditioned (caller substitutes the trivial column)."""
    a, ca, cf, cs = speeds
    u2 = un * un
    scale2 = np.maximum(cf * cf, u2)

    # resonance guards: u ~ 0, |u| ~ ca (2x2 blocks), |u| ~ cf or cs
    tol = 1e-7
    bad = (np.abs(un) < tol * np.sqrt(scale2))
    bad |= np.abs(u2 - ca * ca) < tol * scale2
    bad |= np.abs(u2 - cf * cf) < tol * scale2
    bad |= np.abs(u2 - cs * cs) < tol * scale2

    with np.errstate(divide="ignore", invalid="ignore"):
        delta = rho * u2 - Bn * Bn
        dv = (un * Bt1 + Bn * ut1) / delta
        dBt1 = (rho * un * ut1 + Bn * Bt1) / delta
        dw = (un * Bt2 + Bn * ut2) / delta
        dBt2 = (rho * un * ut2 + Bn * Bt2) / delta

        num = rho * (
            -Bn**3 * gamma * un
            + Bn**2 * Bt1 * (1.0 - gamma) * ut1
            + Bn**2 * Bt2 * (1.0 - gamma) * ut2
            - Bn * (Bt1**2 + Bt2**2) * un
            + Bn * gamma * rho * un**3
            + Bt1 * rho * u2 * ut1 * (gamma - 2.0)
            + Bt2 * rho * u2 * ut2 * (gamma - 2.0)
        )
        den = -un * rho * rho * (u2 - cf * cf) * (u2 - cs * cs)
        drho = num / den
        du = -un * drho / rho
        # drho shifts the transverse blocks through the mass-flux constraint
        dv = dv + (un * Bt1 * Bn / rho) * drho / delta
        dBt1 = dBt1 + u2 * Bt1 * drho / delta
        dw = dw + (un * Bt2 * Bn / rho) * drho / delta
        dBt2 = dBt2 + u2 * Bt2 * drho / delta
        dp = Bn + u2 * drho - Bt1 * dBt1 - Bt2 * dBt2

    cols = np.stack(np.broadcast_arrays(drho, du, dv, dw, dBt1, dBt2, dp), axis=-1)
    mag = np.max(np.abs(cols), axis=-1)
    bad |= ~np.isfinite(mag)
    bad |= mag > 1e6
    cols = np.where(bad[..., None], np.nan, cols)
    return cols


def _u0_kernel_column(rho, un, ut1, ut2, p, Bn, Bt1, Bt2, gamma):
    """Static-state branch of the kernel (u = 0, Bn != 0), valid when
    the tangential energy flux u_t . B_t vanishes."""
    ok = (np.abs(Bn) > DEGEN_EPS) & (
        np.abs(ut1 * Bt1 + ut2 * Bt2) < 1e-9 * np.maximum(Bn * Bn, 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        dv = -ut1 / Bn
        dw = -ut2 / Bn
        dBt1 = -Bt1 / Bn
        dBt2 = -Bt2 / Bn
        dp = Bn + (Bt1 * Bt1 + Bt2 * Bt2) / Bn
    z = np.zeros_like(np.asarray(rho, dtype=float))
    cols = np.stack(np.broadcast_arrays(z, z, dv, dw, dBt1, dBt2, dp), axis=-1)
    return np.where(ok[..., None], cols, np.nan)


def _embed_and_transform(R7, L7, lam7, kcol7, rho, un, ut1, ut2, Bn, Bt1, Bt2, gamma):
    """Assemble the 8x8 conserved-variable basis in the sweep frame.

    kcol7 is the primitive 7-part of the zero-speed column (a unit
    normal-field perturbation is implied); pass zeros for the trivial
    column.
    """
    shp = np.broadcast(rho, un, Bn).shape
    R = np.zeros(shp + (8, 8))
    L = np.zeros(shp + (8, 8))
    D = np.zeros(shp + (8,))

    # variable order (rho, qn, qt1, qt2, Bn, Bt1, Bt2, E); Bn sits at 4
    v7 = [0, 1, 2, 3, 5, 6, 7]
    w7 = [0, 1, 2, 3, 5, 6, 7]  # wave slots; divergence wave sits at 4

    # primitive -> conserved: dU = M dW in the sweep frame
    ke = 0.5 * (un * un + ut1 * ut1 + ut2 * ut2)
    ig = 1.0 / (gamma - 1.0)

    def to_conserved(cols):
        # cols: (..., 7) primitive deltas (drho,dun,dut1,dut2,dBt1,dBt2,dp)
        dr, du, dv, dw, db1, db2, dp = np.moveaxis(cols, -1, 0)
        return (
            dr,
            un * dr + rho * du,
            ut1 * dr + rho * dv,
            ut2 * dr + rho * dw,
            db1,
            db2,
            ke * dr + rho * (un * du + ut1 * dv + ut2 * dw)
            + Bt1 * db1 + Bt2 * db2 + ig * dp,
        )

    for j in range(7):
        cons = to_conserved(R7[..., :, j])
        for irow, val in zip(v7, cons):
            R[..., irow, w7[j]] = val
        D[..., w7[j]] = lam7[..., j]

    # zero-speed column: conserved deltas of (kcol7, dBn = 1), rescaled to
    # unit max-norm so the column stays bounded near wave resonances
    cons = to_conserved(kcol7)
    for irow, val in zip(v7, cons):
        R[..., irow, 4] = val
    R[..., 4, 4] = 1.0
    R[..., 7, 4] += Bn  # dE picks up Bn dBn from the magnetic energy
    knorm = np.maximum(np.max(np.abs(R[..., :, 4]), axis=-1), 1.0)
    R[..., :, 4] /= knorm[..., None]
    D[..., 4] = 0.0

    # conserved -> primitive rows: dW = M^{-1} dU
    gm = gamma - 1.0

    def to_primitive_row(lrow):
        # lrow: (..., 7) primitive-row weights (w_rho..w_p)
        wr, wu, wv, ww, wb1, wb2, wp = np.moveaxis(lrow, -1, 0)
        out = np.zeros(shp + (8,))
        out[..., 0] = wr - (wu * un + wv * ut1 + ww * ut2) / rho + wp * gm * ke
        out[..., 1] = wu / rho - wp * gm * un
        out[..., 2] = wv / rho - wp * gm * ut1
        out[..., 3] = ww / rho - wp * gm * ut2
        out[..., 4] = -wp * gm * Bn
        out[..., 5] = wb1 - wp * gm * Bt1
        out[..., 6] = wb2 - wp * gm * Bt2
        out[..., 7] = wp * gm
        return out

    # block inverse: wave rows subtract their overlap with the zero-speed
    # column; the divergence row is the primitive Bn row itself
    for k in range(7):
        lrow = to_primitive_row(L7[..., k, :])
        overlap = np.einsum("...a,...a->...", L7[..., k, :], kcol7)
        lrow[..., 4] -= overlap
        L[..., w7[k], :] = lrow
    L[..., 4, 4] = knorm  # inverse of the zero-speed column rescaling
    return R, L, D


def eigen_basis_batch(vmean, gamma, divergence="trivial"):
    """Basis at interface mean states, batched.

    vmean: (8, ...) conserved components in the sweep frame.  Returns
    (R, L, D, bad) with R/L of shape (..., 8, 8), D sorted ascending,
    and ``bad`` flagging inadmissible mean states (caller falls back to
    component-wise splitting there).
    """
    rho = vmean[0]
    bad = ~(rho > 0.0)
    safe_rho = np.where(bad, 1.0, rho)
    un = vmean[1] / safe_rho
    ut1 = vmean[2] / safe_rho
    ut2 = vmean[3] / safe_rho
    Bn, Bt1, Bt2 = vmean[4], vmean[5], vmean[6]
    ke = 0.5 * safe_rho * (un**2 + ut1**2 + ut2**2)
    mag = 0.5 * (Bn**2 + Bt1**2 + Bt2**2)
    p = (gamma - 1.0) * (vmean[7] - ke - mag)
    bad |= ~(p > 0.0)
    p = np.where(bad, 1.0, p)
    bad |= ~np.isfinite(un + ut1 + ut2 + p + Bn + Bt1 + Bt2)

    R7, L7, lam7, speeds = _primitive_wave_basis(
        safe_rho, un, ut1, ut2, p, Bn, Bt1, Bt2, gamma)

    if divergence == "kernel":
        kcol = _kernel_column(safe_rho, un, ut1, ut2, p, Bn, Bt1, Bt2, gamma, speeds)
        k0 = _u0_kernel_column(safe_rho, un, ut1, ut2, p, Bn, Bt1, Bt2, gamma)
        kcol = np.where(np.isfinite(kcol).all(axis=-1, keepdims=True), kcol,
                        np.where(np.isfinite(k0).all(axis=-1, keepdims=True), k0, 0.0))
    else:
        kcol = np.zeros(np.broadcast(rho, un).shape + (7,))

    R, L, D = _embed_and_transform(
        R7, L7, lam7, kcol, safe_rho, un, ut1, ut2, Bn, Bt1, Bt2, gamma)

    bad |= ~np.isfinite(R).all(axis=(-2, -1))
    bad |= ~np.isfinite(L).all(axis=(-2, -1))

    # sort eigenvalues ascending, permuting columns of R and rows of L
    order = np.argsort(D, axis=-1, kind="stable")
    D = np.take_along_axis(D, order, axis=-1)
    R = np.take_along_axis(R, order[..., None, :], axis=-1)
    L = np.take_along_axis(L, order[..., :, None], axis=-2)
    return R, L, D, bad


def eigen_basis(vmean, gamma, axis=0):
    """Public per-state basis in standard component order.

    vmean: length-8 conserved state (rho, qx, qy, qz, Bx, By, Bz, E)
    understood with the unit-Mach equation of state.  Returns an
    EigenBasis whose R columns are right eigenvectors of the flux
    Jacobian along ``axis`` (the zero-speed column is the exact kernel
    where the state is non-resonant).  Raises DomainError for
    inadmissible states.
    """
    v = np.asarray(vmean, dtype=float)
    perm = sweep_permutation(axis)
    R, L, D, bad = eigen_basis_batch(v[perm], gamma, divergence="kernel")
    if bad:
        raise DomainError("eigen_basis: inadmissible or non-finite mean state")
    # rows of R (columns of L) live in the sweep frame; scatter them back
    Rstd = np.empty_like(R)
    Lstd = np.empty_like(L)
    Rstd[perm, :] = R
    Lstd[:, perm] = L
    return EigenBasis(R=Rstd, L=Lstd, D=D)
