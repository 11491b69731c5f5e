"""Spectral grid and operator exactness."""

import numpy as np
import pytest

from loopclimb.spectral import (GridSpec, build_wavenumbers, coordinates,
                                dealias_field, divergence, forward,
                                frac_laplacian_half, gradient, inverse,
                                laplacian, random_band_limited)


@pytest.fixture(scope="module")
def grid64():
    return GridSpec(64, 64)


@pytest.fixture(scope="module")
def wn64(grid64):
    return build_wavenumbers(grid64)


@pytest.fixture(scope="module")
def xy64(grid64):
    return coordinates(grid64)


def smooth_random(grid, seed, kmax=10):
    return random_band_limited(grid, kmax, seed)


class TestGridSpec:
    def test_defaults(self):
        g = GridSpec(64, 64)
        assert g.dx == pytest.approx(2 * np.pi / 64)
        assert g.dy == pytest.approx(2 * np.pi / 64)
        assert g.shape == (64, 64)

    @pytest.mark.parametrize("nx,ny", [(63, 64), (64, 63), (2, 64), (64, 0)])
    def test_rejects_odd_or_small(self, nx, ny):
        with pytest.raises(ValueError):
            GridSpec(nx, ny)

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            GridSpec(64, 64, length_x=-1.0)


class TestWaveNumbers:
    def test_small_grid_ordering(self):
        wn = build_wavenumbers(GridSpec(4, 4))
        assert wn.kx.tolist() == [0.0, 1.0, 2.0, -1.0]

    def test_nyquist_max(self):
        wn = build_wavenumbers(GridSpec(64, 64))
        assert np.max(np.abs(wn.kx)) == 32.0

    def test_length_scaling(self):
        wn = build_wavenumbers(GridSpec(4, 4, length_x=4 * np.pi))
        assert wn.kx.tolist() == [0.0, 0.5, 1.0, -0.5]

    def test_mean_mode_zero(self, wn64):
        assert wn64.kx[0] == 0.0
        assert wn64.ky[0] == 0.0
        assert wn64.kmag[0, 0] == 0.0
        assert np.all(wn64.kmag >= 0.0)

    def test_derivative_multiplier_nyquist_zeroed(self, wn64):
        assert wn64.dkx[-1] == 0.0
        assert wn64.dky[32] == 0.0


class TestOperators:
    def test_laplacian_eigenfunction(self, wn64, xy64):
        X, Y = xy64
        f = np.sin(X) * np.sin(Y)
        assert np.max(np.abs(laplacian(f, wn64) + 2 * f)) <= 1e-12

    def test_laplacian_constant(self, wn64):
        f = np.full((64, 64), 3.14)
        assert np.max(np.abs(laplacian(f, wn64))) <= 1e-12

    def test_laplacian_cos3x(self, wn64, xy64):
        X, _ = xy64
        f = np.cos(3 * X)
        assert np.max(np.abs(laplacian(f, wn64) + 9 * f)) <= 1e-12

    def test_half_laplacian_cos(self, wn64, xy64):
        X, _ = xy64
        f = np.cos(X)
        assert np.max(np.abs(frac_laplacian_half(f, wn64) - f)) <= 1e-12

    def test_half_laplacian_constant(self, wn64):
        f = np.ones((64, 64))
        assert np.max(np.abs(frac_laplacian_half(f, wn64))) <= 1e-13

    def test_half_laplacian_mixed_mode(self, wn64, xy64):
        X, Y = xy64
        f = np.cos(3 * X) * np.cos(4 * Y)
        assert np.max(np.abs(frac_laplacian_half(f, wn64) - 5 * f)) <= 1e-12

    def test_gradient_sin(self, wn64, xy64):
        X, _ = xy64
        fx, fy = gradient(np.sin(X), wn64)
        assert np.max(np.abs(fx - np.cos(X))) <= 1e-12
        assert np.max(np.abs(fy)) <= 1e-13

    def test_gradient_constant(self, wn64):
        fx, fy = gradient(np.full((64, 64), -0.7), wn64)
        assert np.max(np.abs(fx)) <= 1e-13
        assert np.max(np.abs(fy)) <= 1e-13

    def test_gradient_sin2y(self, wn64, xy64):
        _, Y = xy64
        fx, fy = gradient(np.sin(2 * Y), wn64)
        assert np.max(np.abs(fx)) <= 1e-13
        assert np.max(np.abs(fy - 2 * np.cos(2 * Y))) <= 1e-12

    def test_divergence_cos(self, wn64, xy64):
        X, _ = xy64
        div = divergence(np.cos(X), np.zeros((64, 64)), wn64)
        assert np.max(np.abs(div + np.sin(X))) <= 1e-12

    def test_divergence_constants(self, wn64):
        div = divergence(np.full((64, 64), 2.0), np.full((64, 64), -1.0), wn64)
        assert np.max(np.abs(div)) <= 1e-13

    def test_divergence_mean_free(self, grid64, wn64):
        rng = np.random.default_rng(7)
        for seed in range(5):
            fx = smooth_random(grid64, seed) * (1 + rng.random())
            fy = smooth_random(grid64, seed + 100)
            div = divergence(fx, fy, wn64)
            assert abs(np.mean(div)) <= 1e-13 * max(np.max(np.abs(div)), 1.0)

    def test_divergence_shape_mismatch(self, wn64):
        with pytest.raises(ValueError):
            divergence(np.zeros((64, 64)), np.zeros((32, 64)), wn64)

    def test_field_grid_mismatch(self, wn64):
        with pytest.raises(ValueError):
            laplacian(np.zeros((32, 32)), wn64)


class TestInvariants:
    def test_round_trip(self, grid64, wn64):
        for seed in range(5):
            f = smooth_random(grid64, seed)
            back = inverse(forward(f, wn64), wn64)
            assert np.max(np.abs(back - f)) <= 1e-13 * max(1.0, np.max(np.abs(f)))

    def test_laplacian_equals_div_grad(self, grid64, wn64):
        # band-limited fields: the Nyquist derivative convention makes the
        # identity exact only below the Nyquist mode
        for seed in range(5):
            f = smooth_random(grid64, seed, kmax=20)
            lhs = laplacian(f, wn64)
            rhs = divergence(*gradient(f, wn64), wn64)
            assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_half_laplacian_squares_to_laplacian(self, grid64, wn64):
        for seed in range(5):
            f = smooth_random(grid64, seed)
            twice = frac_laplacian_half(frac_laplacian_half(f, wn64), wn64)
            assert np.max(np.abs(twice + laplacian(f, wn64))) <= 1e-12

    def test_operators_preserve_zero_mean(self, grid64, wn64):
        f = smooth_random(grid64, 3)
        for g in (laplacian(f, wn64), frac_laplacian_half(f, wn64)):
            assert abs(np.mean(g)) <= 1e-13


class TestDealias:
    def test_mask_requires_flag(self, wn64):
        with pytest.raises(ValueError):
            dealias_field(np.zeros((64, 64)), wn64)

    def test_truncates_high_modes(self, grid64):
        wn = build_wavenumbers(grid64, dealias=True)
        X, Y = coordinates(grid64)
        low = np.cos(3 * X)
        high = np.cos(30 * X) * np.cos(20 * Y)
        filtered = dealias_field(low + high, wn)
        assert np.max(np.abs(filtered - low)) <= 1e-12


def test_random_band_limited_deterministic(grid64):
    a = random_band_limited(grid64, 4, seed=11)
    b = random_band_limited(grid64, 4, seed=11)
    c = random_band_limited(grid64, 4, seed=12)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert abs(np.mean(a)) <= 1e-14
    assert np.max(np.abs(a)) == pytest.approx(1.0)
