"""Core profile, velocity coefficients, and the marker-curve evolver."""

import numpy as np
import pytest

from loopclimb.material import ModelParams, calibrated_h0
from loopclimb.sharp import (Curve, CurveTopologyError, VelocityCoeffs,
                             circle, compute_coefficients,
                             curvature_and_normals, ellipse, evolve_curve,
                             has_self_intersection, hilbert_transform,
                             resample_equal_arclength, solve_core_profile,
                             suggest_curve_dt)

B = 2 * np.pi / 300


@pytest.fixture(scope="module")
def profile_free():
    """Core profile without the self-force (analytic solution -tanh(2 rho))."""
    p = ModelParams(eps=0.1, m0=1.0, beta=1.0, h0=0.0)
    return solve_core_profile(p), p


@pytest.fixture(scope="module")
def profile_forced():
    p = ModelParams(eps=0.1, m0=1.0, beta=1.0,
                    h0=calibrated_h0(1.0, 0.3, B))
    return solve_core_profile(p), p


class TestHilbert:
    def test_single_mode(self):
        x = 2 * np.pi * np.arange(256) / 256
        # H[cos] = sin, H[sin] = -cos
        assert np.allclose(hilbert_transform(np.cos(x)), np.sin(x), atol=1e-12)
        assert np.allclose(hilbert_transform(np.sin(x)), -np.cos(x), atol=1e-12)

    def test_constant_annihilated(self):
        assert np.max(np.abs(hilbert_transform(np.full(128, 2.5)))) <= 1e-13


class TestCoreProfile:
    def test_matches_tanh_without_force(self, profile_free):
        prof, _ = profile_free
        err = np.max(np.abs(prof.u0 + np.tanh(2.0 * prof.rho)))
        assert err <= 1e-6

    def test_far_field_values(self, profile_free):
        prof, _ = profile_free
        assert prof.u0[0] == pytest.approx(1.0, abs=1e-6)
        assert prof.u0[-1] == pytest.approx(-1.0, abs=1e-6)

    def test_monotone_decreasing(self, profile_forced):
        prof, _ = profile_forced
        assert np.all(np.diff(prof.u0) <= 1e-10)

    def test_gradient_integral_analytic(self, profile_free):
        grad_sq, stab, _ = profile_free[0].integrals
        assert grad_sq == pytest.approx(8.0 / 3.0, abs=1e-5)
        assert stab == pytest.approx(2.0 / 3.0, abs=1e-5)

    @pytest.mark.parametrize("fixture", ["profile_free", "profile_forced"])
    def test_flux_integral_profile_independent(self, fixture, request):
        # Int g(U) U' drho = -16/15 for every converged monotone profile
        prof, _ = request.getfixturevalue(fixture)
        assert prof.integrals[2] == pytest.approx(-16.0 / 15.0, abs=1e-6)

    def test_residual_below_tolerance(self, profile_forced):
        prof, _ = profile_forced
        assert prof.residual_norm <= 1e-8

    def test_nonconvergence_raises(self):
        p = ModelParams(eps=0.1, h0=0.0)
        with pytest.raises(RuntimeError, match="converge"):
            solve_core_profile(p, max_iter=200)

    def test_window_validation(self):
        p = ModelParams(eps=0.1)
        with pytest.raises(ValueError):
            solve_core_profile(p, length=10.0)
        with pytest.raises(ValueError):
            solve_core_profile(p, n=512)


class TestCoefficients:
    def test_analytic_values_without_force(self, profile_free):
        prof, p = profile_free
        k = compute_coefficients(prof, p)
        assert k.alpha == pytest.approx(2.5, abs=1e-4)
        assert k.lam == pytest.approx(0.625, abs=1e-4)
        assert k.eta == pytest.approx(0.625, abs=1e-4)

    def test_lambda_scales_with_m0(self, profile_free):
        prof, _ = profile_free
        p2 = ModelParams(eps=0.1, m0=3.0, beta=1.0, h0=0.0)
        k = compute_coefficients(prof, p2)
        assert k.lam == pytest.approx(3.0 * 0.625, abs=3e-4)

    def test_lambda_over_eta_exact(self, profile_forced):
        prof, _ = profile_forced
        p = ModelParams(eps=0.1, m0=0.7, beta=0.31, h0=1.0)
        k = compute_coefficients(prof, p)
        assert k.lam / k.eta == pytest.approx(0.7 / 0.31, rel=1e-12)

    def test_plain_variant(self, profile_free):
        # without the stabilizer factor on the time derivative:
        # lambda = M0 Int[g] / 2 = 1/3 at H0 = 0
        prof, p = profile_free
        k = compute_coefficients(prof, p, lhs_stabilizer=False)
        assert k.alpha == pytest.approx(2.5, abs=1e-4)
        assert k.lam == pytest.approx(1.0 / 3.0, abs=1e-4)

    def test_positive_alpha(self, profile_forced):
        prof, p = profile_forced
        k = compute_coefficients(prof, p)
        assert k.alpha > 0
        assert k.lam > 0


class TestCurveGeometry:
    def test_circle_curvature(self):
        c = circle(2.0, 256)
        kappa, normals, _ = curvature_and_normals(c.vertices)
        assert np.max(np.abs(kappa - 0.5)) <= 1e-3
        # inward normals point at the center
        to_center = -c.vertices / np.hypot(*c.vertices.T)[:, None]
        assert np.max(np.abs(normals - to_center)) <= 1e-3

    def test_second_difference_of_constant_vanishes(self):
        c = circle(1.0, 64)
        _, _, h = curvature_and_normals(c.vertices)
        w = np.full(64, 4.2)
        d2 = (np.roll(w, -1) - 2 * w + np.roll(w, 1)) / (h * h)
        assert np.max(np.abs(d2)) <= 1e-12

    def test_orientation_normalized(self):
        cw = circle(1.0, 64).vertices[::-1]
        c = Curve(cw.copy())
        assert c.enclosed_area() > 0

    def test_too_few_markers_rejected(self):
        th = 2 * np.pi * np.arange(8) / 8
        with pytest.raises(ValueError):
            Curve(np.c_[np.cos(th), np.sin(th)])

    def test_resample_spacing_uniform(self):
        e = ellipse(2.0, 1.0, 128)
        v = resample_equal_arclength(e.vertices, 128)
        seg = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        assert (lengths.max() - lengths.min()) / lengths.mean() <= 0.01

    def test_self_intersection_detection(self):
        th = 2 * np.pi * np.arange(64) / 64
        clean = np.c_[np.cos(th), np.sin(th)]
        assert not has_self_intersection(clean)
        # figure-eight-ish: limacon with inner loop
        r = 1.0 + 1.6 * np.cos(th)
        crossed = np.c_[r * np.cos(th), r * np.sin(th)]
        assert has_self_intersection(crossed)


class TestEvolveCurve:
    COEFFS = VelocityCoeffs(alpha=2.5, lam=0.625, eta=0.625)
    PARAMS = ModelParams(eps=0.1, m0=1.0, beta=1.0, h0=0.0)

    def test_circle_shrinks_on_curvature_term(self):
        c = circle(50.0, 64)
        dt = suggest_curve_dt(self.COEFFS, 2 * np.pi * 50.0 / 64 * 0.9)
        r0 = c.equivalent_radius()
        for _ in range(50):
            c = evolve_curve(c, self.COEFFS, self.PARAMS, dt,
                             check_topology=False)
        assert c.equivalent_radius() < r0

    def test_area_conserved_without_climb(self):
        k0 = VelocityCoeffs(alpha=2.5, lam=0.625, eta=0.0)
        e = ellipse(30.0, 20.0, 256)
        a0 = e.enclosed_area()
        ds = e.perimeter() / 256
        dt = suggest_curve_dt(k0, 0.8 * ds)
        for i in range(1500):
            e = evolve_curve(e, k0, self.PARAMS, dt,
                             check_topology=(i % 250 == 0))
        assert abs(e.enclosed_area() - a0) / a0 <= 1e-4

    def test_pure_self_climb_rounds(self):
        k0 = VelocityCoeffs(alpha=2.5, lam=0.625, eta=0.0)
        e = ellipse(30.0, 20.0, 128)
        iso0 = 4 * np.pi * e.enclosed_area() / e.perimeter() ** 2
        ds = e.perimeter() / 128
        dt = suggest_curve_dt(k0, 0.8 * ds)
        for _ in range(1500):
            e = evolve_curve(e, k0, self.PARAMS, dt, check_topology=False)
        iso1 = 4 * np.pi * e.enclosed_area() / e.perimeter() ** 2
        assert iso1 > iso0

    def test_unknown_f0_mode(self):
        c = circle(10.0, 64)
        with pytest.raises(ValueError):
            evolve_curve(c, self.COEFFS, self.PARAMS, 1e-4, f0_mode="bogus")

    def test_curvature_log_mode_shrinks_faster(self):
        p = ModelParams(eps=0.1, m0=1.0, beta=1.0,
                        h0=calibrated_h0(1.0, 0.3, B))
        c1 = circle(50.0, 64)
        c2 = circle(50.0, 64)
        dt = suggest_curve_dt(self.COEFFS, 2 * np.pi * 50.0 / 64) / 30
        for _ in range(40):
            c1 = evolve_curve(c1, self.COEFFS, p, dt, f0_mode="zero",
                              check_topology=False)
            c2 = evolve_curve(c2, self.COEFFS, p, dt, f0_mode="curvature_log",
                              check_topology=False)
        # ln(eps) < 0 makes -H0 f0 a positive (shrinking) drive
        assert c2.equivalent_radius() < c1.equivalent_radius()

    def test_topology_error_on_crossing(self):
        th = 2 * np.pi * np.arange(64) / 64
        r = 1.0 + 1.6 * np.cos(th)
        with pytest.raises(CurveTopologyError):
            evolve_curve(Curve(np.c_[r * np.cos(th), r * np.sin(th)]),
                         self.COEFFS, self.PARAMS, 1e-12)
