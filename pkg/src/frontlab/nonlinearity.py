"""Time-heterogeneous ignition nonlinearities f(t,u) = g(t) * f0(u).

The reaction vanishes for u <= theta and at u = 1, is positive on
(theta, 1) and negative above 1.  The forcing g(t) is a uniformly
positive trigonometric sum, so the envelopes g_min*f0 and g_max*f0
bracket f(t,.) for all times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

TWO_PI = 2.0 * math.pi


class HypothesisError(ValueError):
    """A model failed one of its structural hypotheses."""


@dataclass(frozen=True)
class ForcingComponent:
    frequency: float  # 1/time
    amplitude: float  # dimensionless
    phase: float = 0.0  # radians


@dataclass(frozen=True)
class ForcingSignal:
    """g(t) = base_level + sum_i amplitude_i * sin(2 pi frequency_i t + phase_i)."""

    kind: str  # constant | periodic | quasi_periodic | random_phase_sum
    base_level: float
    components: tuple[ForcingComponent, ...] = ()

    def __post_init__(self):
        if self.kind not in ("constant", "periodic", "quasi_periodic", "random_phase_sum"):
            raise ValueError(f"unknown forcing kind {self.kind!r}")
        if not math.isfinite(self.base_level):
            raise ValueError("base_level must be finite")

    @property
    def amplitude_sum(self) -> float:
        return float(sum(abs(c.amplitude) for c in self.components))

    @property
    def g_min(self) -> float:
        return self.base_level - self.amplitude_sum

    @property
    def g_max(self) -> float:
        return self.base_level + self.amplitude_sum

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(c.frequency for c in self.components)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        g = np.full_like(t, self.base_level, dtype=float)
        for c in self.components:
            g = g + c.amplitude * np.sin(TWO_PI * c.frequency * t + c.phase)
        return g if g.ndim else float(g)

    def shifted(self, tau: float) -> "ForcingSignal":
        """The forcing of the time-translated medium t -> t + tau."""
        comps = tuple(
            ForcingComponent(c.frequency, c.amplitude, c.phase + TWO_PI * c.frequency * tau)
            for c in self.components
        )
        return replace(self, components=comps)

    # -- factories -------------------------------------------------------

    @staticmethod
    def constant(level: float = 1.0) -> "ForcingSignal":
        return ForcingSignal("constant", level)

    @staticmethod
    def periodic(base_level: float = 1.0, amplitude: float = 0.25,
                 frequency: float = 1.0, phase: float = 0.0) -> "ForcingSignal":
        return ForcingSignal("periodic", base_level,
                             (ForcingComponent(frequency, amplitude, phase),))

    @staticmethod
    def quasi_periodic(base_level: float,
                       components: list[tuple[float, float, float]]) -> "ForcingSignal":
        comps = tuple(ForcingComponent(f, a, p) for f, a, p in components)
        return ForcingSignal("quasi_periodic", base_level, comps)

    @staticmethod
    def random_phase_sum(base_level: float, frequencies: list[float],
                         amplitudes: list[float], seed: int) -> "ForcingSignal":
        rng = np.random.default_rng(seed)
        comps = tuple(
            ForcingComponent(f, a, float(rng.uniform(0.0, TWO_PI)))
            for f, a in zip(frequencies, amplitudes)
        )
        return ForcingSignal("random_phase_sum", base_level, comps)


# ---------------------------------------------------------------------------
# reaction shapes


def _quadratic_ignition_shape(theta: float):
    """(u - theta)+ (1 - u) on u <= 1, linear continuation -(1-theta)(u-1) above."""
    slope_above = 1.0 - theta

    def f0(u):
        u = np.asarray(u, dtype=float)
        mid = (u - theta) * (1.0 - u)
        out = np.where(u <= theta, 0.0, np.where(u <= 1.0, mid, -slope_above * (u - 1.0)))
        return out if out.ndim else float(out)

    def f0_prime(u):
        u = np.asarray(u, dtype=float)
        mid = 1.0 + theta - 2.0 * u
        out = np.where(u <= theta, 0.0, np.where(u <= 1.0, mid, -slope_above))
        return out if out.ndim else float(out)

    return f0, f0_prime


SHAPE_REGISTRY = {"quadratic_ignition": _quadratic_ignition_shape}


@dataclass(frozen=True)
class IgnitionNonlinearity:
    """Validated-on-demand model f(t,u) = g(t) * f0(u)."""

    theta: float
    theta_star: float
    forcing: ForcingSignal = field(default_factory=lambda: ForcingSignal.constant())
    shape: str = "quadratic_ignition"
    # non-default shapes may be supplied programmatically
    shape_fn: Optional[Callable] = None
    shape_prime: Optional[Callable] = None

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0,1)")
        if not self.theta < self.theta_star < 1.0:
            raise ValueError("theta_star must lie in (theta,1)")
        if self.shape_fn is None and self.shape not in SHAPE_REGISTRY:
            raise ValueError(f"unknown shape {self.shape!r}")

    # -- shape access ----------------------------------------------------

    def _shape_pair(self):
        if self.shape_fn is not None:
            return self.shape_fn, self.shape_prime
        return SHAPE_REGISTRY[self.shape](self.theta)

    def f0(self, u):
        return self._shape_pair()[0](u)

    def f0_prime(self, u):
        fn, der = self._shape_pair()
        if der is not None:
            return der(u)
        h = 1e-6
        return (np.asarray(fn(u + h)) - np.asarray(fn(u - h))) / (2.0 * h)

    # -- model surface ---------------------------------------------------

    def g(self, t):
        return self.forcing(t)

    def reaction(self, t, u):
        """Fast vectorized f(t,u) for the PDE stepper (no input checks)."""
        return self.forcing(t) * self.f0(u)

    def reaction_u(self, t, u):
        return self.forcing(t) * self.f0_prime(u)

    @property
    def lip_const(self) -> float:
        """Lipschitz constant of f(t,.) on [0, 1.2], uniform in t."""
        u = np.linspace(0.0, 1.2, 2001)
        return float(self.forcing.g_max * np.max(np.abs(self.f0_prime(u))))

    @property
    def beta(self) -> float:
        """Decay-rate constant: -df/du >= beta on u >= theta_star."""
        u = np.linspace(self.theta_star, 1.2, 1001)
        return float(self.forcing.g_min * np.min(-self.f0_prime(u)))

    def f_inf(self, u):
        return self.forcing.g_min * self.f0(u)

    def f_sup(self, u):
        return self.forcing.g_max * self.f0(u)

    def time_shift(self, tau: float) -> "IgnitionNonlinearity":
        """The model of the translated medium, f(. + tau, .)."""
        return replace(self, forcing=self.forcing.shifted(tau))


def evaluate(model: IgnitionNonlinearity, t: float, u, with_derivative: bool = False):
    """f(t,u), optionally with the u-derivative.

    Exact derivative for registered shapes, central differences otherwise.
    """
    u_arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u_arr)) or not np.isfinite(t):
        raise ValueError("evaluate requires finite (t,u)")
    value = model.reaction(t, u)
    if not with_derivative:
        return value
    return value, model.reaction_u(t, u)


# ---------------------------------------------------------------------------
# bistable extension


@dataclass(frozen=True)
class BistableReaction:
    """C1 bistable comparison reaction: negative bump on (0,theta), f_inf above.

    The bump is -s u^2 (theta-u)^2 plus the unique cubic u^2 (u-theta)
    multiple that matches the slope of f_inf at theta, with s set to half
    the largest value keeping the integral over [0,1] positive.
    """

    theta: float
    bump_scale: float  # s
    slope_coeff: float  # coefficient of u^2 (u - theta)
    model: IgnitionNonlinearity
    integral: float  # quadrature of f_B over [0,1]

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        bump = (-self.bump_scale * u ** 2 * (self.theta - u) ** 2
                + self.slope_coeff * u ** 2 * (u - self.theta))
        out = np.where(u <= 0.0, 0.0, np.where(u < self.theta, bump, self.model.f_inf(u)))
        return out if out.ndim else float(out)

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        th = self.theta
        bump_d = (-self.bump_scale * (2 * u * (th - u) ** 2 - 2 * u ** 2 * (th - u))
                  + self.slope_coeff * (3 * u ** 2 - 2 * th * u))
        above = self.model.forcing.g_min * self.model.f0_prime(u)
        out = np.where(u <= 0.0, 0.0, np.where(u < th, bump_d, above))
        return out if out.ndim else float(out)

    @property
    def lip_const(self) -> float:
        u = np.linspace(-0.1, 1.2, 4001)
        return float(np.max(np.abs(self.derivative(u))))

    def reaction(self, t, u):
        return self(u)


@dataclass(frozen=True)
class HomogeneousReaction:
    """Adapter exposing a plain reaction f(u) through the model surface the
    solver and constant-derivation routines expect."""

    f: Callable
    lip_const: float
    theta: Optional[float] = None
    theta_star: Optional[float] = None
    beta: Optional[float] = None
    fprime: Optional[Callable] = None

    def reaction(self, t, u):
        return self.f(u)

    def reaction_u(self, t, u):
        if self.fprime is not None:
            return self.fprime(u)
        h = 1e-6
        return (np.asarray(self.f(u + h)) - np.asarray(self.f(u - h))) / (2 * h)


class BistableConstructionError(ValueError):
    """The positive envelope mass cannot dominate any admissible bump."""


def bistable_extension(model: IgnitionNonlinearity) -> BistableReaction:
    """Bistable comparison reaction f_B <= f(t,.) with positive total mass."""
    theta = model.theta
    g_min = model.forcing.g_min
    # slope of f_inf at theta+ (exact for the default shape, sampled otherwise)
    slope_at_theta = float(g_min * model.f0_prime(np.nextafter(theta, 1.0)))

    from scipy.integrate import quad

    pos_mass, _ = quad(lambda u: float(model.f_inf(u)), theta, 1.0, limit=200)
    c3 = slope_at_theta / theta ** 2
    # integral of u^2 (u - theta) over (0, theta) is -theta^4 / 12
    cubic_mass = -c3 * theta ** 4 / 12.0
    headroom = pos_mass + cubic_mass
    if headroom <= 0.0:
        raise BistableConstructionError(
            f"envelope mass {pos_mass:.3e} cannot dominate slope-matching bump "
            f"({-cubic_mass:.3e})"
        )
    # integral of u^2 (theta - u)^2 over (0, theta) is theta^5 / 30
    s_max = headroom / (theta ** 5 / 30.0)
    s = 0.5 * s_max
    integral = headroom - s * theta ** 5 / 30.0
    return BistableReaction(theta, s, c3, model, float(integral))


# ---------------------------------------------------------------------------
# hypothesis validation


@dataclass(frozen=True)
class HypothesisReport:
    h1: bool
    h2: bool
    h3: bool
    h4: bool
    beta: float
    g_min: float
    g_max: float
    c_lip: float
    resolution: tuple[int, int]
    witnesses: dict

    @property
    def all_pass(self) -> bool:
        return self.h1 and self.h2 and self.h3 and self.h4


def validate_hypotheses(model: IgnitionNonlinearity,
                        grid: tuple[int, int] = (400, 400),
                        t_span: Optional[tuple[float, float]] = None) -> HypothesisReport:
    """Sampled check of the structural hypotheses on a (t,u) grid.

    The hypotheses quantify over all of R; this checks them on
    [-2T, 2T] x [0, 1.2] (T = slowest forcing period) plus the analytic
    shortcuts available for the default family.
    """
    nt, nu = grid
    if nt <= 0 or nu <= 0:
        raise ValueError("sampling resolution must be positive")
    if t_span is None:
        freqs = [abs(f) for f in model.forcing.frequencies if f != 0.0]
        period = 1.0 / min(freqs) if freqs else 1.0
        t_span = (-2.0 * period, 2.0 * period)
    ts = np.linspace(t_span[0], t_span[1], nt)
    us = np.linspace(0.0, 1.2, nu)
    gs = model.forcing(ts)
    f0s = np.asarray(model.f0(us))
    fvals = gs[:, None] * f0s[None, :]

    witnesses: dict = {}
    theta, theta_star = model.theta, model.theta_star

    # H1: sign structure, uniform positivity of g
    below = us <= theta
    inside = (us > theta) & (us < 1.0)
    above = us > 1.0
    h1 = True
    if np.any(np.abs(fvals[:, below]) > 0.0):
        h1 = False
        witnesses["h1"] = _witness(ts, us[below], np.abs(fvals[:, below]) > 0)
    at_one = np.abs(gs * float(np.asarray(model.f0(1.0))))
    if np.any(at_one > 1e-14):
        h1 = False
        witnesses.setdefault("h1", (float(ts[int(np.argmax(at_one))]), 1.0))
    if np.any(fvals[:, inside] <= 0.0):
        h1 = False
        witnesses.setdefault("h1", _witness(ts, us[inside], fvals[:, inside] <= 0))
    if np.any(fvals[:, above] >= 0.0):
        h1 = False
        witnesses.setdefault("h1", _witness(ts, us[above], fvals[:, above] >= 0))

    # H2: positive envelopes sandwich f on [theta, 1]
    g_min, g_max = model.forcing.g_min, model.forcing.g_max
    h2 = g_min > 0.0
    if not h2:
        witnesses["h2"] = "g_min <= 0: lower envelope not positive"
    else:
        band = (us >= theta) & (us <= 1.0)
        lo = g_min * f0s[None, band]
        hi = g_max * f0s[None, band]
        bad = (fvals[:, band] < lo - 1e-12) | (fvals[:, band] > hi + 1e-12)
        if np.any(bad):
            h2 = False
            witnesses["h2"] = _witness(ts, us[band], bad)

    # H3: strictly negative slope above theta_star; the reported beta uses
    # the analytic envelope bound (sampled time grids miss the forcing min)
    star = us >= theta_star
    dfdu = gs[:, None] * np.asarray(model.f0_prime(us))[None, star]
    sampled_beta = float(np.min(-dfdu)) if star.any() else float("nan")
    h3 = sampled_beta > 0.0
    beta = min(model.beta, sampled_beta)
    if not h3:
        witnesses["h3"] = _witness(ts, us[star], -dfdu <= 0)

    # H4: uniform Hoelder (here Lipschitz) continuity of t -> f(t,u)
    rate = TWO_PI * sum(abs(c.amplitude * c.frequency) for c in model.forcing.components)
    quotients = np.abs(np.diff(gs)) / np.diff(ts)
    h4 = bool(np.all(quotients <= rate * 1.0001 + 1e-12))
    if not h4:
        k = int(np.argmax(quotients))
        witnesses["h4"] = (float(ts[k]), float(quotients[k]))

    return HypothesisReport(
        h1=h1, h2=h2, h3=h3, h4=h4,
        beta=beta if h3 else 0.0,
        g_min=g_min, g_max=g_max,
        c_lip=model.lip_const,
        resolution=grid,
        witnesses=witnesses,
    )


def _witness(ts, us, bad2d):
    it, iu = np.argwhere(bad2d)[0]
    return (float(ts[it]), float(us[iu]))


def require_valid(model: IgnitionNonlinearity,
                  grid: tuple[int, int] = (100, 400)) -> HypothesisReport:
    """Validate and raise on failure; constructors downstream call this."""
    report = validate_hypotheses(model, grid=grid)
    if not report.all_pass:
        failed = [name for name in ("h1", "h2", "h3", "h4") if not getattr(report, name)]
        raise HypothesisError(f"model violates {failed}; witnesses: {report.witnesses}")
    return report


DEFAULT_MODEL = IgnitionNonlinearity(
    theta=0.25,
    theta_star=0.75,
    forcing=ForcingSignal.periodic(base_level=1.0, amplitude=0.25, frequency=1.0),
)
