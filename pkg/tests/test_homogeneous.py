import numpy as np
import pytest

from frontlab.homogeneous import (ShootingError, exact_cubic_wave,
                                  solve_bistable_wave,
                                  solve_ignition_floor_wave)
from frontlab.nonlinearity import DEFAULT_MODEL, bistable_extension

from conftest import (CUBIC_A, CUBIC_SPEED, cubic_profile, cubic_reaction,
                      cubic_reaction_prime)


class TestCubicOracle:
    def test_speed_matches_exact(self):
        wave = solve_bistable_wave(cubic_reaction, 1e-8,
                                   fprime=cubic_reaction_prime)
        assert wave.speed == pytest.approx(CUBIC_SPEED, abs=1e-6)
        assert wave.residual < 1e-8

    def test_profile_matches_exact_up_to_shift(self):
        wave = solve_bistable_wave(cubic_reaction, 1e-8,
                                   fprime=cubic_reaction_prime)
        # the solver anchors phi(0) = (1 + a)/2; locate that level on the
        # exact logistic profile and compare after shifting
        level = 0.5 * (1.0 + CUBIC_A)
        x0 = np.sqrt(2.0) * np.log(1.0 / level - 1.0)
        mask = np.abs(wave.x) < 15.0
        exact = cubic_profile(wave.x[mask] + x0)
        np.testing.assert_allclose(wave.phi[mask], exact, atol=2e-6)

    def test_zero_speed_for_balanced_cubic(self):
        f = lambda u: u * (1.0 - u) * (u - 0.5)
        wave = solve_bistable_wave(f, 1e-6)
        assert wave.speed == pytest.approx(0.0, abs=1e-6)

    def test_shared_library_consistency(self):
        profile, speed, reaction, _ = exact_cubic_wave(CUBIC_A)
        assert speed == pytest.approx(CUBIC_SPEED, rel=1e-15)
        xs = np.linspace(-10, 10, 101)
        np.testing.assert_allclose(profile(xs), cubic_profile(xs), rtol=1e-14)
        np.testing.assert_allclose(reaction(xs / 20 + 0.4),
                                   cubic_reaction(xs / 20 + 0.4), rtol=1e-14)


class TestStationaryResidual:
    def test_profile_solves_wave_ode(self):
        wave = solve_bistable_wave(cubic_reaction, 1e-8,
                                   fprime=cubic_reaction_prime)
        h = wave.x[1] - wave.x[0]
        phi = wave.phi
        interior = slice(1, -1)
        d2 = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / h ** 2
        d1 = (phi[2:] - phi[:-2]) / (2 * h)
        residual = d2 + wave.speed * d1 + cubic_reaction(phi[interior])
        # centered stencils on the sampled profile: O(h^2)
        assert np.max(np.abs(residual)) < 10.0 * h ** 2


class TestDefaultFamily:
    def test_bistable_speed_positive_and_mesh_consistent(self):
        fb = bistable_extension(DEFAULT_MODEL)
        coarse = solve_bistable_wave(fb, 1e-4, fprime=fb.derivative)
        fine = solve_bistable_wave(fb, 1e-7, fprime=fb.derivative)
        assert fine.speed > 0.0
        assert abs(coarse.speed - fine.speed) < 1e-3

    def test_speed_invariant_under_integrator_refinement(self):
        fb = bistable_extension(DEFAULT_MODEL)
        tolerance = 1e-6
        a = solve_bistable_wave(fb, tolerance, fprime=fb.derivative,
                                ivp_rtol=1e-10)
        b = solve_bistable_wave(fb, tolerance, fprime=fb.derivative,
                                ivp_rtol=5e-11)
        assert abs(a.speed - b.speed) < 2.0 * tolerance


class TestIgnitionFloor:
    def test_right_limit_is_floor(self):
        model = DEFAULT_MODEL
        theta_i = model.theta / 4.0
        wave = solve_ignition_floor_wave(model.f_sup, theta_I=theta_i,
                                         theta=model.theta, tolerance=1e-8)
        assert wave.phi[-1] == pytest.approx(theta_i, abs=1e-6)
        assert wave.right_limit == theta_i
        assert np.all(np.diff(wave.phi) <= 1e-12)

    def test_floor_above_theta_rejected(self):
        model = DEFAULT_MODEL
        with pytest.raises(ValueError):
            solve_ignition_floor_wave(model.f_sup, theta_I=0.3,
                                      theta=model.theta)

    def test_upper_wave_at_least_bistable(self, anchors):
        wb, wi = anchors
        assert wi.speed >= wb.speed

    def test_monotone_in_envelope(self):
        model = DEFAULT_MODEL
        base = solve_ignition_floor_wave(model.f_sup, theta_I=model.theta / 4,
                                         theta=model.theta, tolerance=1e-6)
        doubled = solve_ignition_floor_wave(
            lambda u: 2.0 * model.f_sup(u), theta_I=model.theta / 4,
            theta=model.theta, tolerance=1e-6)
        assert doubled.speed >= base.speed - 1e-6

    def test_anchor_level(self):
        model = DEFAULT_MODEL
        theta_i = model.theta / 4.0
        wave = solve_ignition_floor_wave(model.f_sup, theta_I=theta_i,
                                         theta=model.theta, tolerance=1e-7)
        assert wave(0.0) == pytest.approx(0.5 * (1 + theta_i), abs=1e-6)


class TestBracketFailure:
    def test_no_sign_change_reports_bracket(self):
        # a reaction with huge positive mass propagates faster than the
        # scanned ceiling
        f = lambda u: 100.0 * u * (1.0 - u) * (u - 0.05)
        with pytest.raises(ShootingError, match="bracket"):
            solve_bistable_wave(f, 1e-6, speed_bracket=(1e-4, 0.2))
