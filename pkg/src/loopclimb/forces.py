"""Long-range climb force generated by the dislocation field.

Production path: a half-Laplacian multiplier in Fourier space,
f_d = G b^2 / (4(1-nu)) * (-lap)^(1/2) u.

A direct real-space quadrature of the equivalent free-space kernel,

    f_d(x, y) = G b^2 / (8 pi (1-nu)) * Int[ ((x-xb)/R^3) u_xb
                                           + ((y-yb)/R^3) u_yb ] dxb dyb,

is provided as an O(N^2)-in-gridpoints test oracle.  It treats the kernel
as free-space and omits the singular self-cell (principal value), so it is
accurate only for fields that decay well inside the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .material import ModelParams
from .spectral import (WaveNumbers, coordinates, frac_laplacian_half,
                       gradient, laplacian)

__all__ = ["ForceField", "climb_prefactor", "climb_force_spectral",
           "climb_force_kernel_oracle"]

# h-linear correction constant of the punctured rectangle rule for this
# kernel: error = -c * h * lap(u) at the puncture, with c half the
# regularized square-lattice sum of 1/|r| (= 3.90026492/2).  Calibrated
# against the analytic Gaussian case and Richardson-extrapolated in h.
_CELL_PV = 1.95013246


@dataclass(frozen=True)
class ForceField:
    """Dislocation-generated climb force f_d (zero mean), applied constant,
    and their sum."""

    f_d: np.ndarray
    f_app: float
    f_total: np.ndarray


def climb_prefactor(p: ModelParams) -> float:
    """G b^2 / (4 (1 - nu))."""
    return p.shear_g * p.b * p.b / (4.0 * (1.0 - p.nu))


def climb_force_spectral(u: np.ndarray, p: ModelParams, wn: WaveNumbers) -> ForceField:
    """Climb force via the |k| multiplier; f_total adds the applied constant."""
    f_d = climb_prefactor(p) * frac_laplacian_half(u, wn)
    return ForceField(f_d=f_d, f_app=p.f_app, f_total=f_d + p.f_app)


def _spectral_upsample(f: np.ndarray, factor: int) -> np.ndarray:
    """Trigonometric interpolation onto a ``factor`` x finer grid."""
    ny, nx = f.shape
    fh = np.fft.rfft2(f)
    big = np.zeros((ny * factor, nx * factor // 2 + 1), dtype=complex)
    big[: ny // 2, : nx // 2 + 1] = fh[: ny // 2]
    big[ny * factor - ny // 2:, : nx // 2 + 1] = fh[ny // 2:]
    return np.fft.irfft2(big, s=(ny * factor, nx * factor)) * factor * factor


def climb_force_kernel_oracle(u: np.ndarray, p: ModelParams, wn: WaveNumbers,
                              refine: int = 16, near: int = 10,
                              images: int = 1) -> np.ndarray:
    """Direct quadrature of the free-space climb-force kernel.

    Midpoint rule over all source cells, with two singular-quadrature
    repairs: cells within ``near`` of the target are re-integrated on a
    ``refine`` x finer grid (trigonometric interpolation of the spectral
    gradient), and the singular cell itself contributes its analytic
    principal value -c*h*lap(u), c = 2 ln(1+sqrt 2).  The source field is
    periodic, so ``images`` rings of repeated tiles are included; the
    truncated far tail still leaves a small nearly-constant offset, so
    comparisons against the (mean-free) spectral path should subtract the
    means.

    Intended for validation only: cost is quadratic in the number of
    grid points.
    """
    grid = wn.grid
    if not math.isclose(grid.dx, grid.dy):
        raise ValueError("kernel oracle assumes square cells")
    nx, ny = grid.nx, grid.ny
    ux, uy = gradient(u, wn)
    lap = laplacian(u, wn)
    X, Y = coordinates(grid)
    base = p.shear_g * p.b * p.b / (8.0 * np.pi * (1.0 - p.nu))

    uxf = _spectral_upsample(ux, refine)
    uyf = _spectral_upsample(uy, refine)
    hf = grid.dx / refine
    nfx, nfy = nx * refine, ny * refine
    xf = -0.5 * grid.length_x + hf * np.arange(nfx)
    yf = -0.5 * grid.length_y + hf * np.arange(nfy)
    half = refine // 2

    # tile the periodic source over the image rings once
    reps = 2 * images + 1
    ux_ext = np.tile(ux, (reps, reps))
    uy_ext = np.tile(uy, (reps, reps))
    x_ext = np.concatenate([X[0] + s * grid.length_x
                            for s in range(-images, images + 1)])
    y_ext = np.concatenate([Y[:, 0] + s * grid.length_y
                            for s in range(-images, images + 1)])
    home_j = images * ny
    home_i = images * nx

    out = np.empty(grid.shape)
    for j in range(ny):
        ry_all = (Y[j, 0] - y_ext)[:, None]
        for i in range(nx):
            rx_all = (X[j, i] - x_ext)[None, :]
            r2 = rx_all * rx_all + ry_all * ry_all
            r2[home_j + j, home_i + i] = np.inf
            coarse = np.sum((rx_all * ux_ext + ry_all * uy_ext) * r2 ** -1.5)

            # the home-tile near block is replaced by the refined sum
            jlo, jhi = max(j - near, 0), min(j + near, ny - 1)
            ilo, ihi = max(i - near, 0), min(i + near, nx - 1)
            blk = (slice(jlo, jhi + 1), slice(ilo, ihi + 1))
            rx = X[j, i] - X[blk]
            ry = Y[j, i] - Y[blk]
            r2 = rx * rx + ry * ry
            r2[j - jlo, i - ilo] = np.inf
            coarse -= np.sum((rx * ux[blk] + ry * uy[blk]) * r2 ** -1.5)

            fjlo, fjhi = jlo * refine - half, jhi * refine + half - 1
            filo, fihi = ilo * refine - half, ihi * refine + half - 1
            fj = slice(max(fjlo, 0), min(fjhi, nfy - 1) + 1)
            fi = slice(max(filo, 0), min(fihi, nfx - 1) + 1)
            frx = X[j, i] - xf[fi][None, :]
            fry = Y[j, i] - yf[fj][:, None]
            fr2 = frx * frx + fry * fry
            fr2[fr2 == 0.0] = np.inf  # the target coincides with a fine node
            fine = np.sum((frx * uxf[fj, fi] + fry * uyf[fj, fi]) * fr2 ** -1.5)

            out[j, i] = (coarse * grid.cell_area + fine * hf * hf
                         - _CELL_PV * hf * lap[j, i])
    return base * out
