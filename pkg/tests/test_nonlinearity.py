import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson

from frontlab.nonlinearity import (BistableConstructionError, ForcingSignal,
                                   HypothesisError, IgnitionNonlinearity,
                                   bistable_extension, evaluate,
                                   require_valid, validate_hypotheses)


def make_model(theta=0.25, theta_star=0.75, amplitude=0.25, base=1.0,
               frequency=1.0):
    if amplitude == 0.0:
        forcing = ForcingSignal.constant(base)
    else:
        forcing = ForcingSignal.periodic(base, amplitude, frequency)
    return IgnitionNonlinearity(theta=theta, theta_star=theta_star,
                                forcing=forcing)


class TestEvaluate:
    def test_zero_below_theta(self):
        model = make_model()
        assert evaluate(model, 0.0, 0.1) == 0.0
        assert evaluate(model, 3.7, 0.25) == 0.0

    def test_zero_at_one(self):
        model = make_model()
        for t in (-2.0, 0.0, 0.33, 17.0):
            assert evaluate(model, t, 1.0) == 0.0

    def test_default_shape_arithmetic(self):
        # g(t) = 1 + 0.5 sin(2 pi t): at t = 1/4 the forcing peaks at 1.5
        model = make_model(amplitude=0.5)
        value = evaluate(model, 0.25, 0.5)
        assert value == pytest.approx(1.5 * 0.25 * 0.5, abs=1e-12)

    def test_negative_above_one(self):
        model = make_model()
        assert evaluate(model, 0.0, 1.1) < 0.0

    def test_derivative_exact_for_default_shape(self):
        model = make_model()
        _, deriv = evaluate(model, 0.1, 0.6, with_derivative=True)
        g = model.g(0.1)
        assert deriv == pytest.approx(g * (1 + 0.25 - 2 * 0.6), rel=1e-12)

    def test_rejects_non_finite(self):
        model = make_model()
        with pytest.raises(ValueError):
            evaluate(model, 0.0, np.nan)
        with pytest.raises(ValueError):
            evaluate(model, np.inf, 0.5)


class TestHypotheses:
    def test_default_family_passes(self):
        report = validate_hypotheses(make_model())
        assert report.all_pass

    def test_beta_value(self):
        # g_min = 0.5 and theta* = 0.75: beta = 0.5 (1 + 0.25 - 2*0.75)
        report = validate_hypotheses(make_model(amplitude=0.5))
        assert report.h3
        assert report.beta == pytest.approx(0.125, rel=1e-9)

    def test_constant_forcing_h4(self):
        report = validate_hypotheses(make_model(amplitude=0.0))
        assert report.h4

    def test_vanishing_lower_envelope_fails_h2(self):
        report = validate_hypotheses(make_model(amplitude=1.0))
        assert not report.h2
        assert "h2" in report.witnesses
        with pytest.raises(HypothesisError):
            require_valid(make_model(amplitude=1.0))

    def test_envelope_sandwich_sampled(self):
        model = make_model()
        rng = np.random.default_rng(7)
        ts = rng.uniform(-5, 5, 40)
        us = rng.uniform(model.theta, 1.0, 40)
        for t in ts:
            vals = model.reaction(t, us)
            assert np.all(vals >= model.f_inf(us) - 1e-12)
            assert np.all(vals <= model.f_sup(us) + 1e-12)

    def test_h3_slope_bound_on_band(self):
        model = make_model()
        us = np.linspace(model.theta_star, 1.2, 257)
        for t in np.linspace(-2, 2, 17):
            assert np.all(model.reaction_u(t, us) <= -model.beta + 1e-12)


class TestBistableExtension:
    def test_negative_on_lower_interval(self):
        fb = bistable_extension(make_model())
        assert fb(0.125) < 0.0
        us = np.linspace(1e-4, 0.25 - 1e-4, 200)
        assert np.all(fb(us) < 0.0)

    def test_matches_lower_envelope_above_theta(self):
        model = make_model()
        fb = bistable_extension(model)
        assert fb(0.625) == pytest.approx(model.f_inf(0.625), rel=1e-14)
        us = np.linspace(0.25, 1.0, 101)
        np.testing.assert_allclose(fb(us), model.f_inf(us), rtol=1e-13)

    def test_positive_mass(self):
        # oracle: composite quadrature of the assembled reaction
        fb = bistable_extension(make_model())
        us = np.linspace(0.0, 1.0, 20001)
        mass = simpson(fb(us), x=us)
        assert mass > 0.0
        assert fb.integral == pytest.approx(mass, rel=1e-5)

    def test_c1_at_junctions(self):
        fb = bistable_extension(make_model())
        eps = 1e-7
        for u0 in (0.25, 0.0):
            left = (fb(u0) - fb(u0 - eps)) / eps
            right = (fb(u0 + eps) - fb(u0)) / eps
            assert abs(left - right) < 1e-5
        # one-sided analytic derivatives at theta agree to 1e-10:
        # the bump's left limit is slope_coeff * theta^2 algebraically
        model = make_model()
        left_limit = fb.slope_coeff * 0.25 ** 2
        right_limit = model.forcing.g_min * (1.0 - 0.25)
        assert abs(left_limit - right_limit) < 1e-10

    def test_degenerate_envelope_rejected(self):
        # theta close to 1 leaves too little positive mass
        model = IgnitionNonlinearity(theta=0.7, theta_star=0.9,
                                     forcing=ForcingSignal.constant(1.0))
        with pytest.raises(BistableConstructionError):
            bistable_extension(model)


class TestTimeShift:
    def test_identity(self):
        model = make_model()
        shifted = model.time_shift(0.0)
        ts = np.linspace(-3, 3, 50)
        np.testing.assert_allclose(shifted.g(ts), model.g(ts), rtol=1e-15)

    def test_full_period(self):
        model = make_model()
        shifted = model.time_shift(1.0)
        ts = np.linspace(-3, 3, 101)
        us = np.linspace(0, 1.2, 7)
        for u in us:
            np.testing.assert_allclose(shifted.reaction(ts, u),
                                       model.reaction(ts, u), atol=1e-12)

    @given(a=st.floats(-5, 5), b=st.floats(-5, 5))
    @settings(max_examples=25, deadline=None)
    def test_shift_composition(self, a, b):
        model = make_model(frequency=0.37)
        once = model.time_shift(a).time_shift(b)
        direct = model.time_shift(a + b)
        ts = np.linspace(-1, 1, 11)
        np.testing.assert_allclose(once.g(ts), direct.g(ts), atol=1e-9)

    def test_preserves_hypothesis_verdicts(self):
        model = make_model(amplitude=0.3)
        base = validate_hypotheses(model, grid=(100, 200))
        for tau in (0.3, -1.7, 12.0):
            shifted = validate_hypotheses(model.time_shift(tau),
                                          grid=(100, 200))
            assert (shifted.h1, shifted.h2, shifted.h3, shifted.h4) == \
                (base.h1, base.h2, base.h3, base.h4)


class TestForcing:
    def test_bounds(self):
        f = ForcingSignal.quasi_periodic(1.0, [(1.0, 0.2, 0.0),
                                               (np.sqrt(2), 0.15, 1.0)])
        ts = np.linspace(-20, 20, 5000)
        gs = f(ts)
        assert np.all(gs >= f.g_min - 1e-12)
        assert np.all(gs <= f.g_max + 1e-12)
        assert f.g_min == pytest.approx(0.65)
        assert f.g_max == pytest.approx(1.35)

    def test_random_phase_sum_deterministic(self):
        a = ForcingSignal.random_phase_sum(1.0, [1.0, 2.0], [0.1, 0.1], seed=3)
        b = ForcingSignal.random_phase_sum(1.0, [1.0, 2.0], [0.1, 0.1], seed=3)
        assert a == b

    def test_invalid_kind_rejected(self):
        with pytest.raises(ValueError):
            ForcingSignal("sometimes", 1.0)
