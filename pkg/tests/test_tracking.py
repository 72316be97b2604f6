import numpy as np
import pytest

from frontlab import pde, tracking
from frontlab.nonlinearity import DEFAULT_MODEL, HomogeneousReaction

from conftest import (CUBIC_SPEED, cubic_profile, cubic_reaction,
                      cubic_reaction_prime)


def field_from(values, h=0.05, left=0.0, time=0.0):
    grid = pde.Grid1D(left, h, len(values))
    return pde.Field(grid, np.asarray(values, dtype=float), time)


class TestInterfaceLocation:
    def test_linear_ramp_exact(self):
        x = np.linspace(0, 1, 21)
        fld = field_from(1.0 - x, h=0.05, left=0.0)
        assert tracking.interface_location(fld, 0.5) == pytest.approx(0.5)

    def test_translation_equivariance(self):
        grid = pde.Grid1D(-30.0, 0.05, 1201)
        base = pde.Field(grid, cubic_profile(grid.x), 0.0)
        xi0 = tracking.interface_location(base, 0.4)
        shifted = pde.Field(grid, cubic_profile(grid.x - 7.3), 0.0)
        xi1 = tracking.interface_location(shifted, 0.4)
        assert xi1 - xi0 == pytest.approx(7.3, abs=1e-3)

    def test_no_crossing(self):
        fld = field_from(np.full(50, 0.3))
        with pytest.raises(tracking.NoCrossingError):
            tracking.interface_location(fld, 0.5)

    def test_level_range_checked(self):
        fld = field_from(np.linspace(1, 0, 50))
        with pytest.raises(ValueError):
            tracking.interface_location(fld, 1.5)


class TestModifiedInterface:
    def test_linear_trace_hits_at_four(self):
        # xi(t) = t with slope floor 1/2 and offset 2: first hit solves
        # t = 2 + t/2, i.e. t = 4
        times = np.linspace(0.0, 20.0, 4001)
        mod = tracking.modified_interface(times, times.copy(), c_b=1.0,
                                          c0_offset=2.0, delta_star=0.5)
        assert mod.hit_times[1] == pytest.approx(4.0, abs=1e-9)
        assert mod.hit_times[2] == pytest.approx(8.0, abs=1e-8)

    def test_envelope_bounds_and_slopes(self):
        times = np.linspace(0.0, 20.0, 4001)
        xi = times + 0.3 * np.sin(2.2 * times)
        mod = tracking.modified_interface(times, xi, c_b=1.0, c0_offset=2.0,
                                          delta_star=0.5)
        vals = mod(times)
        assert np.all(vals - xi >= -1e-9)
        assert mod.d_max <= 2.0 + 0.75 * 1.0 * 20.0  # C0 + (3/4) c_B t_B slack
        slopes = mod.derivative(times)
        assert np.all(slopes >= 0.5 * 1.0 - 1e-12)
        assert np.all(slopes <= mod.slope_max + 1e-12)

    def test_smooth_at_corners(self):
        times = np.linspace(0.0, 20.0, 8001)
        mod = tracking.modified_interface(times, times.copy(), c_b=1.0,
                                          c0_offset=2.0, delta_star=0.5)
        t_hit = mod.hit_times[1]
        eps = 1e-7
        jump = mod(t_hit + eps) - mod(t_hit - eps)
        assert abs(jump) < 1e-5  # value-continuous through the restart
        d_left = mod.derivative(t_hit - 1e-9)
        d_right = mod.derivative(t_hit + 1e-9)
        assert d_left == pytest.approx(0.5, abs=1e-6)
        assert d_right == pytest.approx(0.5, abs=1e-6)

    def test_incomplete_trace(self):
        times = np.linspace(0.0, 2.0, 101)
        xi = -0.1 * times  # drifts backward: never hits the envelope
        with pytest.raises(tracking.IncompleteTraceError):
            tracking.modified_interface(times, xi, c_b=1.0, c0_offset=2.0,
                                        delta_star=0.1)

    def test_margin_enforced(self):
        times = np.linspace(0.0, 40.0, 2001)
        with pytest.raises(ValueError, match="5/4"):
            tracking.modified_interface(times, times.copy(), c_b=1.0,
                                        c0_offset=2.0, delta_star=0.5,
                                        c_i=2.0, t_i=1.0)


class TestProfiles:
    def test_center_value_is_level(self, burned_ref, default_model):
        xi = tracking.interface_location(burned_ref, default_model.theta)
        prof = tracking.extract_profile(burned_ref, xi)
        # the crossing is refined linearly while the profile resamples with
        # monotone cubics, so the center agrees to the O(h^2) interp gap
        assert prof.values[prof.center_index] == pytest.approx(
            default_model.theta, abs=5e-4)

    def test_gauge_invariance(self):
        grid = pde.Grid1D(-30.0, 0.05, 1201)
        a = pde.Field(grid, cubic_profile(grid.x), 0.0)
        shifted_grid = pde.Grid1D(-30.0 + 4.0, 0.05, 1201)
        b = pde.Field(shifted_grid, cubic_profile(shifted_grid.x - 4.0), 0.0)
        pa = tracking.extract_profile(a, 0.0, half_width=20.0)
        pb = tracking.extract_profile(b, 4.0, half_width=20.0)
        np.testing.assert_allclose(pa.values, pb.values, atol=1e-12)

    def test_margin_violation(self):
        grid = pde.Grid1D(0.0, 0.05, 101)
        fld = pde.Field(grid, np.linspace(1, 0, 101), 0.0)
        with pytest.raises(ValueError):
            tracking.extract_profile(fld, 4.9)


class TestSpeedFormula:
    def test_exact_wave_speed(self):
        model = HomogeneousReaction(f=cubic_reaction, lip_const=1.2,
                                    theta=0.25, fprime=cubic_reaction_prime)
        grid = pde.Grid1D(-30.0, 0.05, 1201)
        fld = pde.Field(grid, cubic_profile(grid.x), 0.0)
        xi = tracking.interface_location(fld, 0.25)
        prof = tracking.extract_profile(fld, xi, half_width=15.0)
        speed = tracking.speed_at_interface(prof, model)
        assert speed == pytest.approx(CUBIC_SPEED, abs=5e-3)

    def test_degenerate_interface(self):
        model = DEFAULT_MODEL
        offsets = 0.05 * np.arange(-100, 101)
        values = 0.25 - 1e-6 * offsets  # nearly flat through the level
        prof = tracking.WaveProfileSnapshot(offsets, values, 0.0, 0.0)
        with pytest.raises(tracking.DegenerateInterfaceError):
            tracking.speed_at_interface(prof, model)

    def test_formula_matches_finite_difference(self, default_model,
                                               solver_cfg, burned_ref):
        fld = burned_ref.copy()
        speeds, times = [], []
        xi_series = []
        for _ in range(20):
            fld, _ = pde.evolve(fld, default_model, solver_cfg,
                                fld.time + 0.1)
            xi = tracking.interface_location(fld, default_model.theta)
            prof = tracking.extract_profile(fld, xi, half_width=20.0)
            speeds.append(tracking.speed_at_interface(prof, default_model))
            xi_series.append(xi)
            times.append(fld.time)
        fd = np.gradient(np.asarray(xi_series), np.asarray(times))
        # interior points: formula vs centered differences of xi_theta
        err = np.max(np.abs(fd[2:-2] - np.asarray(speeds)[2:-2]))
        assert err < 0.05


class TestTailFit:
    def test_recovers_exact_rate(self):
        offsets = 0.05 * np.arange(-40, 201)
        values = 0.25 * np.exp(-0.7 * offsets)
        prof = tracking.WaveProfileSnapshot(offsets, values, 0.0, 0.0)
        fit = tracking.fit_exponential_tail(prof, 0.5, 8.0)
        assert fit.rate == pytest.approx(0.7, rel=1e-10)
        assert fit.prefactor == pytest.approx(0.25, rel=1e-8)
        assert fit.residual < 1e-12

    def test_rejects_core_range(self):
        offsets = 0.05 * np.arange(-40, 201)
        prof = tracking.WaveProfileSnapshot(offsets,
                                            0.25 * np.exp(-0.7 * offsets),
                                            0.0, 0.0)
        with pytest.raises(ValueError, match="x_lo"):
            tracking.fit_exponential_tail(prof, -1.0, 5.0)

    def test_rejects_nonpositive(self):
        offsets = 0.05 * np.arange(0, 400)
        values = 0.1 - 0.01 * offsets  # crosses zero at offset 10
        prof = tracking.WaveProfileSnapshot(offsets, values, 0.0, 0.0)
        with pytest.raises(ValueError, match="nonpositive"):
            tracking.fit_exponential_tail(prof, 0.0, 15.0)


class TestFrontTrace:
    def test_level_ordering(self, default_model, solver_cfg, burned_ref):
        fld = burned_ref.copy()
        levels = (0.1, 0.25, 0.5, 0.75, 0.9)
        _, raw = pde.evolve(fld, default_model, solver_cfg, fld.time + 3.0,
                            levels=levels)
        trace = tracking.FrontTrace.from_evolution(raw, default_model.theta)
        assert trace.level_ordering_violations() == 0

    def test_csv_roundtrip(self, tmp_path):
        times = np.linspace(0, 1, 11)
        trace = tracking.FrontTrace(times=times,
                                    xi_by_level={0.25: times * 0.5},
                                    theta=0.25)
        path = tmp_path / "trace.csv"
        trace.to_csv(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (11, 3)  # t, xi_theta, speed_fd
        np.testing.assert_allclose(data[:, 1], times * 0.5, atol=1e-15)
