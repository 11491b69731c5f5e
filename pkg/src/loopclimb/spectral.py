"""Periodic grid and exact spectral differential operators.

Fields are real ``(ny, nx)`` arrays sampled on a uniform grid covering
``[-length_x/2, length_x/2) x [-length_y/2, length_y/2)``; y is the outer
(first) index.  All operators multiply in Fourier space via the real FFT,
so they are exact on every resolved trigonometric mode.

Conventions
-----------
* Forward transform unnormalized, inverse carries the 1/(nx*ny) factor
  (numpy's default); the tiny imaginary residue of the inverse transform
  is discarded.
* The first-derivative multiplier is zeroed at the Nyquist mode (an odd
  multiplier has no consistent value there on an even grid); |k| and |k|^2
  keep their Nyquist values.
* No dealiasing unless a wavenumber table is built with ``dealias=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TAU = 2.0 * math.pi

__all__ = [
    "GridSpec",
    "WaveNumbers",
    "build_wavenumbers",
    "coordinates",
    "forward",
    "inverse",
    "laplacian",
    "frac_laplacian_half",
    "gradient",
    "divergence",
    "dealias_field",
    "random_band_limited",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform doubly periodic grid: counts and physical side lengths."""

    nx: int
    ny: int
    length_x: float = TAU
    length_y: float = TAU

    def __post_init__(self):
        for name, n in (("nx", self.nx), ("ny", self.ny)):
            if n < 4 or n % 2 != 0:
                raise ValueError(f"{name} must be even and >= 4, got {n}")
        if self.length_x <= 0 or self.length_y <= 0:
            raise ValueError("domain lengths must be positive")

    @property
    def dx(self) -> float:
        return self.length_x / self.nx

    @property
    def dy(self) -> float:
        return self.length_y / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy


def _fft_modes(n: int, length: float) -> np.ndarray:
    # Standard FFT ordering 0, 1, ..., n/2, -n/2+1, ..., -1 scaled by 2*pi/length.
    # The Nyquist entry is stored positive.
    modes = np.concatenate([np.arange(0, n // 2 + 1), np.arange(-n // 2 + 1, 0)])
    return (TAU / length) * modes.astype(float)


@dataclass(frozen=True)
class WaveNumbers:
    """Precomputed angular wavenumbers and multiplier grids for one grid.

    ``kx``/``ky`` are full-length 1-D arrays in FFT ordering.  The 2-D
    multiplier grids (``k2``, ``kmag``) live in the half-spectrum layout of
    the real FFT: shape ``(ny, nx//2 + 1)``.  ``dkx``/``dky`` are the
    first-derivative multipliers with the Nyquist entry zeroed.
    """

    grid: GridSpec
    kx: np.ndarray
    ky: np.ndarray
    k2: np.ndarray
    kmag: np.ndarray
    dkx: np.ndarray
    dky: np.ndarray
    dealias_mask: np.ndarray | None = None


def build_wavenumbers(grid: GridSpec, dealias: bool = False) -> WaveNumbers:
    """Build the wavenumber tables for ``grid``.

    Parameters
    ----------
    grid : GridSpec
    dealias : bool
        When True also build a 2/3-rule truncation mask (off by default;
        useful for stability studies only).
    """
    kx = _fft_modes(grid.nx, grid.length_x)
    ky = _fft_modes(grid.ny, grid.length_y)
    kx_half = kx[: grid.nx // 2 + 1]

    k2 = ky[:, None] ** 2 + kx_half[None, :] ** 2
    kmag = np.sqrt(k2)

    dkx = kx_half.copy()
    dkx[-1] = 0.0  # Nyquist
    dky = ky.copy()
    dky[grid.ny // 2] = 0.0

    mask = None
    if dealias:
        cut_x = (2.0 / 3.0) * np.max(np.abs(kx))
        cut_y = (2.0 / 3.0) * np.max(np.abs(ky))
        mask = (np.abs(kx_half)[None, :] <= cut_x) & (np.abs(ky)[:, None] <= cut_y)

    return WaveNumbers(grid=grid, kx=kx, ky=ky, k2=k2, kmag=kmag,
                       dkx=dkx, dky=dky, dealias_mask=mask)


def coordinates(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Physical coordinate arrays X, Y of shape (ny, nx), domain centered at 0."""
    x = -0.5 * grid.length_x + grid.dx * np.arange(grid.nx)
    y = -0.5 * grid.length_y + grid.dy * np.arange(grid.ny)
    return np.meshgrid(x, y)


def _check_field(f: np.ndarray, wn: WaveNumbers) -> None:
    if f.shape != wn.grid.shape:
        raise ValueError(f"field shape {f.shape} does not match grid {wn.grid.shape}")


def forward(f: np.ndarray, wn: WaveNumbers) -> np.ndarray:
    """Real FFT of a field; half-spectrum layout (ny, nx//2+1)."""
    _check_field(f, wn)
    return np.fft.rfft2(f)


def inverse(fh: np.ndarray, wn: WaveNumbers) -> np.ndarray:
    """Inverse real FFT back to a (ny, nx) field."""
    return np.fft.irfft2(fh, s=wn.grid.shape)


def laplacian(f: np.ndarray, wn: WaveNumbers) -> np.ndarray:
    """Spectral Laplacian (multiplier -|k|^2); output has zero grid mean."""
    return inverse(-wn.k2 * forward(f, wn), wn)


def frac_laplacian_half(f: np.ndarray, wn: WaveNumbers) -> np.ndarray:
    """Half Laplacian (-lap)^(1/2): multiplier |k|; annihilates the mean."""
    return inverse(wn.kmag * forward(f, wn), wn)


def gradient(f: np.ndarray, wn: WaveNumbers) -> tuple[np.ndarray, np.ndarray]:
    """Spectral (d/dx, d/dy) with the Nyquist derivative zeroed."""
    fh = forward(f, wn)
    fx = inverse(1j * wn.dkx[None, :] * fh, wn)
    fy = inverse(1j * wn.dky[:, None] * fh, wn)
    return fx, fy


def divergence(fx: np.ndarray, fy: np.ndarray, wn: WaveNumbers) -> np.ndarray:
    """Spectral d/dx fx + d/dy fy; exactly mean-free on the torus."""
    if fx.shape != fy.shape:
        raise ValueError(f"component shapes differ: {fx.shape} vs {fy.shape}")
    _check_field(fx, wn)
    gh = 1j * wn.dkx[None, :] * np.fft.rfft2(fx) + 1j * wn.dky[:, None] * np.fft.rfft2(fy)
    return inverse(gh, wn)


def dealias_field(f: np.ndarray, wn: WaveNumbers) -> np.ndarray:
    """Truncate modes outside the 2/3 rule (requires dealias=True tables)."""
    if wn.dealias_mask is None:
        raise ValueError("wavenumbers were built without a dealias mask")
    return inverse(np.where(wn.dealias_mask, forward(f, wn), 0.0), wn)


def random_band_limited(grid: GridSpec, kmax: int, seed: int,
                        amplitude: float = 1.0) -> np.ndarray:
    """Smooth random field with integer modes |kx|,|ky| <= kmax, zero mean.

    Deterministic for a given seed; rescaled so max|f| = amplitude.
    """
    rng = np.random.default_rng(seed)
    fh = np.zeros((grid.ny, grid.nx // 2 + 1), dtype=complex)
    rows = [j % grid.ny for j in range(-kmax, kmax + 1)]
    for j in rows:
        for i in range(0, kmax + 1):
            fh[j, i] = rng.normal() + 1j * rng.normal()
    fh[0, 0] = 0.0
    f = np.fft.irfft2(fh, s=grid.shape)
    peak = np.max(np.abs(f))
    if peak == 0.0:
        return f
    return f * (amplitude / peak)
