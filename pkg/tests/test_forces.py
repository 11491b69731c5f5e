"""Climb force: spectral path, kernel-quadrature oracle, and their agreement."""

import numpy as np
import pytest

from loopclimb.forces import (climb_force_kernel_oracle, climb_force_spectral,
                              climb_prefactor)
from loopclimb.material import ModelParams
from loopclimb.spectral import (GridSpec, build_wavenumbers, coordinates,
                                random_band_limited)


@pytest.fixture(scope="module")
def setup64():
    grid = GridSpec(64, 64)
    return grid, build_wavenumbers(grid), coordinates(grid)


def test_constant_gives_zero_force(setup64):
    grid, wn, _ = setup64
    p = ModelParams(eps=0.1, shear_g=1.0, nu=0.0, b=1.0)
    ff = climb_force_spectral(np.full(grid.shape, 0.3), p, wn)
    assert np.max(np.abs(ff.f_d)) <= 1e-13
    oracle = climb_force_kernel_oracle(np.full(grid.shape, 0.3), p, wn)
    assert np.max(np.abs(oracle)) <= 1e-13


def test_cos_mode_prefactor(setup64):
    # G = b = 1, nu = 0: prefactor 1/4 and |k| = 1
    grid, wn, (X, _) = setup64
    p = ModelParams(eps=0.1, shear_g=1.0, nu=0.0, b=1.0)
    ff = climb_force_spectral(np.cos(X), p, wn)
    assert np.max(np.abs(ff.f_d - 0.25 * np.cos(X))) <= 1e-12


def test_f_total_adds_applied_force(setup64):
    grid, wn, (X, _) = setup64
    p = ModelParams(eps=0.1, shear_g=1.0, nu=0.0, b=1.0, f_app=0.7)
    ff = climb_force_spectral(np.cos(X), p, wn)
    assert ff.f_app == 0.7
    assert np.allclose(ff.f_total, ff.f_d + 0.7)


def test_linearity_machine_precision(setup64):
    grid, wn, _ = setup64
    p = ModelParams(eps=0.1)
    u1 = random_band_limited(grid, 8, seed=1)
    u2 = random_band_limited(grid, 8, seed=2)
    f1 = climb_force_spectral(u1, p, wn).f_d
    f2 = climb_force_spectral(u2, p, wn).f_d
    f12 = climb_force_spectral(2.0 * u1 - 0.5 * u2, p, wn).f_d
    assert np.max(np.abs(f12 - (2.0 * f1 - 0.5 * f2))) <= 1e-12 * np.max(np.abs(f1))


def test_zero_mean(setup64):
    grid, wn, _ = setup64
    p = ModelParams(eps=0.1)
    for seed in range(4):
        u = random_band_limited(grid, 10, seed=seed) + 0.5
        ff = climb_force_spectral(u, p, wn)
        assert abs(np.mean(ff.f_d)) <= 1e-14


def test_oracle_radial_symmetry(setup64):
    # a radially symmetric bump gives a force field symmetric under x <-> y
    # (the grid's half-open seam breaks reflection symmetry, not transpose)
    grid, wn, (X, Y) = setup64
    p = ModelParams(eps=0.1)
    u = np.exp(-4.0 * (X ** 2 + Y ** 2))
    f = climb_force_kernel_oracle(u, p, wn)
    assert np.max(np.abs(f - f.T)) <= 1e-10 * np.max(np.abs(f))


def test_spectral_matches_kernel_oracle_64():
    # tighter agreement is asserted on the 128^2 grid in the acceptance
    # suite; the oracle misses the image lattice's constant offset, so the
    # comparison is between mean-free fields
    from loopclimb.spectral import forward, inverse
    grid = GridSpec(64, 64)
    wn = build_wavenumbers(grid)
    X, Y = coordinates(grid)
    p = ModelParams(eps=3 * grid.dx)
    u_raw = np.tanh((np.hypot(X, Y) - 0.7) / (1.5 * p.eps))
    kcut = 0.5 * np.max(np.abs(wn.kx))
    u = inverse(np.where(wn.kmag <= kcut, forward(u_raw, wn), 0.0), wn)
    f_spec = climb_force_spectral(u, p, wn).f_d
    f_orac = climb_force_kernel_oracle(u, p, wn)
    f_orac = f_orac - np.mean(f_orac)
    rel = np.linalg.norm(f_spec - f_orac) / np.linalg.norm(f_orac)
    assert rel <= 2e-3


def test_prefactor_formula():
    p = ModelParams(eps=0.1, shear_g=2.0, nu=0.25, b=0.5)
    assert climb_prefactor(p) == pytest.approx(2.0 * 0.25 / (4 * 0.75))
