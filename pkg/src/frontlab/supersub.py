"""Super/sub-solution envelopes squeezing wave-like solutions.

Builds the constant bundle (L0, alpha, M, omega, epsilon0, ...) measured
from a converged reference wave, the monotone C2 cutoff Gamma with an
exponential right branch, and the two-sided envelopes

    u+-(t,x) = u_ref(t, x - zeta(t)) +- q(t) Gamma(x - xi_tilde(t) - zeta(t)),

whose parabolic residual signs certify that the true solution stays
trapped between shifted copies of the reference wave.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .pde import Field, WaveHistory, pde_residual, rightmost_crossing
from .tracking import ModifiedInterface, extract_profile, fit_exponential_tail


class DerivationError(RuntimeError):
    """The reference wave is not converged enough to measure constants."""


class SandwichError(RuntimeError):
    """Initial data cannot be trapped between shifted reference waves."""


class ShiftRangeError(RuntimeError):
    """No admissible shift in the scanned range."""


# ---------------------------------------------------------------------------
# constants


def alpha_rate(alpha0: float, c_b: float, c_0: float) -> float:
    return min(0.5 * alpha0, c_b / 8.0, c_0)


def omega_rate(beta: float, alpha: float, c_b: float, c_lip: float) -> float:
    return min(beta, alpha * c_b / 4.0 - alpha * alpha, c_lip)


def envelope_drift_gain(c_lip: float, c_gamma: float, c_l0: float) -> float:
    return (2.0 * c_lip + c_gamma) / c_l0


def epsilon_cap(theta: float, theta_star: float, c_b: float, m: float) -> float:
    return min(0.5 * theta, 0.5 * (1.0 - theta_star), c_b / (4.0 * m))


@dataclass(frozen=True)
class SqueezeConstants:
    L0: float
    alpha: float
    M: float
    omega: float
    epsilon0: float
    C_Lip: float
    C_Gamma: float
    C_L0: float
    beta: float
    c_B: float
    c_0: float
    alpha0: float
    theta: float
    theta_star: float

    def __post_init__(self):
        for name in ("L0", "alpha", "M", "omega", "epsilon0", "C_Lip",
                     "C_Gamma", "C_L0", "beta", "c_B", "c_0"):
            if getattr(self, name) <= 0.0:
                raise DerivationError(f"constant {name} must be positive, "
                                      f"got {getattr(self, name)}")

    @property
    def nu(self) -> float:
        """Diagnostic decay rate alpha c_B / 2 - alpha^2 (> 0 by alpha <= c_B/8)."""
        return self.alpha * self.c_B / 2.0 - self.alpha ** 2

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# the Gamma cutoff


def _smoothstep(s):
    return s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


def _smoothstep_d(s):
    return 30.0 * s ** 2 * (1.0 - s) ** 2


def _smoothstep_int(s):
    """Integral of the quintic smoothstep from 0; equals 1/2 at s = 1."""
    return s ** 4 * (2.5 - 3.0 * s + s ** 2)


@dataclass
class GammaBridge:
    """Monotone C2 cutoff: 1 on the left, e^{-alpha (x - L0)} on the right.

    Written as Gamma = exp(-alpha rho(x)) with rho identically 0 left of
    L0 - 1, equal to x - L0 right of L0 + 1, and bridged by the integral
    of a quintic smoothstep in between, so Gamma' <= 0 holds for every
    (alpha, L0).  The bridge deviates from the flats only inside
    [L0 - 1, L0 + 1], well within the nominal interval [-L0-1, L0+1].
    """

    alpha: float
    L0: float
    C_Gamma: float = np.nan

    @property
    def x_left(self) -> float:
        return -self.L0 - 1.0

    @property
    def x_right(self) -> float:
        return self.L0 + 1.0

    def _rho(self, x):
        s = np.clip((x - self.L0 + 1.0) / 2.0, 0.0, 1.0)
        ramp = 2.0 * _smoothstep_int(s)
        return np.where(x >= self.x_right, x - self.L0, ramp)

    def _rho_d(self, x):
        s = np.clip((x - self.L0 + 1.0) / 2.0, 0.0, 1.0)
        return np.where(x >= self.x_right, 1.0, _smoothstep(s))

    def _rho_dd(self, x):
        s = np.clip((x - self.L0 + 1.0) / 2.0, 0.0, 1.0)
        return np.where(x >= self.x_right, 0.0, 0.5 * _smoothstep_d(s))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(-self.alpha * self._rho(x))
        return out if out.ndim else float(out)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = -self.alpha * self._rho_d(x) * np.exp(-self.alpha * self._rho(x))
        return out if out.ndim else float(out)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        rho, rd, rdd = self._rho(x), self._rho_d(x), self._rho_dd(x)
        out = (self.alpha ** 2 * rd ** 2 - self.alpha * rdd) * np.exp(-self.alpha * rho)
        return out if out.ndim else float(out)


def build_gamma(alpha: float, L0: float) -> GammaBridge:
    """Construct the cutoff and report C_Gamma from dense sampling."""
    if alpha <= 0.0 or L0 <= 0.0:
        raise DerivationError("alpha and L0 must be positive")
    bridge = GammaBridge(alpha=alpha, L0=L0)
    xs = np.linspace(-L0 - 2.0, L0 + 4.0, 20001)
    if np.any(bridge.derivative(xs) > 1e-12):
        raise DerivationError("Gamma bridge is not monotone for these "
                              f"constants (alpha={alpha}, L0={L0})")
    bridge.C_Gamma = float(np.max(np.abs(bridge.second_derivative(xs))))
    return bridge


# ---------------------------------------------------------------------------
# constant derivation from a converged reference wave


def _snapshot_xi(fld: Field, theta: float) -> float:
    pos = rightmost_crossing(fld.grid.x, fld.values, theta)
    if pos is None:
        raise DerivationError("reference snapshot does not cross theta")
    return pos


def derive_constants(history: WaveHistory, model, alpha0: float, *,
                     c_b: Optional[float] = None,
                     d_max: Optional[float] = None,
                     tail_range: tuple[float, float] = (1.0, 25.0),
                     ) -> tuple[SqueezeConstants, GammaBridge]:
    """Measure the envelope constants from evolved reference-wave data.

    The core half-width L0 is the smallest width satisfying both
    level-confinement inequalities over the sampled times, then doubled
    for margin; the steepness floor C_L0 and the tail rate c_0 are
    measured on the same snapshots; the remaining constants follow the
    closed formulas.
    """
    if alpha0 <= 0.0:
        raise ValueError("alpha0 must be positive")
    if len(history) < 3:
        raise DerivationError("need at least 3 reference snapshots")
    theta, theta_star = model.theta, model.theta_star
    if c_b is None:
        from .homogeneous import solve_bistable_wave
        from .nonlinearity import bistable_extension
        fb = bistable_extension(model)
        c_b = solve_bistable_wave(fb, 1e-6, fprime=fb.derivative).speed

    hi_level = 0.5 * (1.0 + theta_star)
    lo_level = 0.5 * theta
    l0_half = 0.0
    xi_list = []
    rates = []
    for i in range(len(history)):
        fld = history.snapshot(i)
        x = fld.grid.x
        if np.any(np.diff(fld.values) > 1e-6):
            raise DerivationError(
                f"snapshot at t={fld.time:.4g} is not monotone; reference "
                "not converged")
        xi = _snapshot_xi(fld, theta)
        xi_list.append(xi)
        x_hi = rightmost_crossing(x, fld.values, hi_level)
        x_lo = rightmost_crossing(x, fld.values, lo_level)
        if x_hi is None or x_lo is None:
            raise DerivationError(
                "confinement levels not attained; window too small or "
                "reference not converged")
        l0_half = max(l0_half, xi - x_hi, x_lo - xi)
        prof = extract_profile(fld, xi)
        x_max = min(tail_range[1], prof.offsets[-1])
        fit = fit_exponential_tail(prof, tail_range[0], x_max)
        rates.append(fit.rate)
    L0 = 2.0 * (2.0 * l0_half)
    c_0 = float(min(rates))

    if d_max is None:
        d_max = 2.0 * c_b  # placeholder scale when no envelope trace is given

    region = L0 + 1.0 + d_max
    c_l0 = np.inf
    for i in range(len(history)):
        fld = history.snapshot(i)
        x = fld.grid.x
        ux = np.gradient(fld.values, x)
        mask = np.abs(x - xi_list[i]) <= region
        if not mask.any():
            raise DerivationError("steepness region misses the window")
        c_l0 = min(c_l0, float(np.min(-ux[mask])))
    if c_l0 <= 0.0:
        raise DerivationError(
            f"steepness floor nonpositive ({c_l0:.3e}) on the core region; "
            "reference not converged")

    alpha = alpha_rate(alpha0, c_b, c_0)
    gamma = build_gamma(alpha, L0)
    m_gain = envelope_drift_gain(model.lip_const, gamma.C_Gamma, c_l0)
    omega = omega_rate(model.beta, alpha, c_b, model.lip_const)
    eps0 = epsilon_cap(theta, theta_star, c_b, m_gain)
    consts = SqueezeConstants(
        L0=L0, alpha=alpha, M=m_gain, omega=omega, epsilon0=eps0,
        C_Lip=model.lip_const, C_Gamma=gamma.C_Gamma, C_L0=c_l0,
        beta=model.beta, c_B=c_b, c_0=c_0, alpha0=alpha0,
        theta=theta, theta_star=theta_star)
    return consts, gamma


# ---------------------------------------------------------------------------
# sandwich shifts


def _shifted_reference(ref: Field) -> Callable:
    spline = CubicSpline(ref.grid.x, ref.values)

    def evaluate(xq):
        xq = np.asarray(xq, dtype=float)
        out = np.empty_like(xq)
        left = xq < ref.grid.x[0]
        right = xq > ref.grid.x[-1]
        mid = ~(left | right)
        out[left] = 1.0
        out[right] = 0.0
        out[mid] = spline(xq[mid])
        return out

    return evaluate


def _bisect_threshold(ok: Callable[[float], bool], lo: float, hi: float,
                      tol: float, want_smallest: bool) -> float:
    """Find the boundary of a monotone predicate on [lo, hi].

    want_smallest: ok is monotone increasing in the argument; returns the
    smallest value with ok.  Otherwise ok is monotone decreasing and the
    largest value with ok is returned.
    """
    if want_smallest:
        if ok(lo):
            return lo
        if not ok(hi):
            raise ShiftRangeError(f"predicate fails on the whole range "
                                  f"[{lo:.4g}, {hi:.4g}]")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if ok(mid):
                hi = mid
            else:
                lo = mid
        return hi
    if ok(hi):
        return hi
    if not ok(lo):
        raise ShiftRangeError(f"predicate fails on the whole range "
                              f"[{lo:.4g}, {hi:.4g}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def initial_sandwich(u0: Field, reference: Field, xi_tilde0: float,
                     consts: SqueezeConstants, gamma: GammaBridge,
                     epsilon: float) -> tuple[float, float, float]:
    """Smallest upper and largest lower shifts trapping u0 between
    Gamma-corrected copies of the reference, widened to a gap >= epsilon."""
    if not 0.0 < epsilon <= consts.epsilon0:
        raise ValueError(f"epsilon must lie in (0, epsilon0={consts.epsilon0:.4g}]")
    x = u0.grid.x
    ref_eval = _shifted_reference(reference)
    span = 0.25 * (x[-1] - x[0])
    tol = u0.grid.h / 16.0

    def upper_ok(zeta):
        bound = ref_eval(x - zeta) + epsilon * gamma(x - xi_tilde0 - zeta)
        return bool(np.all(u0.values <= bound + 1e-13))

    def lower_ok(zeta):
        bound = ref_eval(x - zeta) - epsilon * gamma(x - xi_tilde0 - zeta)
        return bool(np.all(u0.values >= bound - 1e-13))

    try:
        z_plus = _bisect_threshold(upper_ok, -span, span, tol,
                                   want_smallest=True)
        z_minus = _bisect_threshold(lower_ok, -span, span, tol,
                                    want_smallest=False)
    except ShiftRangeError as exc:
        worst = _worst_offset(u0, ref_eval, gamma, xi_tilde0, epsilon, span)
        raise SandwichError(
            f"initial data not sandwichable: {exc}; worst offset at "
            f"x={worst[0]:.4g} (excess {worst[1]:.3e})") from exc

    gap = z_plus - z_minus
    if gap < epsilon:
        pad = 0.5 * (epsilon - gap)
        z_plus += pad
        z_minus -= pad
    return z_minus, z_plus, epsilon


def _worst_offset(u0, ref_eval, gamma, xi_tilde0, epsilon, span):
    x = u0.grid.x
    bound = ref_eval(x - span) + epsilon * gamma(x - xi_tilde0 - span)
    excess = u0.values - bound
    i = int(np.argmax(excess))
    return float(x[i]), float(excess[i])


def tightest_shift(u: Field, reference: Field, q: float, side: str) -> float:
    """Smallest (upper) / largest (lower) shift zeta with the one-sided
    slack inequality against reference(. - zeta) holding nodewise."""
    if q < 0.0:
        raise ValueError("slack q must be nonnegative")
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    for fld in (u, reference):
        if np.any(np.diff(fld.values) > 1e-6):
            raise ValueError("tightest_shift requires monotone-decreasing fields")
    x = u.grid.x
    ref_eval = _shifted_reference(reference)
    span = 0.5 * (x[-1] - x[0])
    tol = 1e-11

    if side == "upper":
        def ok(zeta):
            return bool(np.all(u.values <= ref_eval(x - zeta) + q + 1e-13))
        return _bisect_threshold(ok, -span, span, tol, want_smallest=True)

    def ok(zeta):
        return bool(np.all(u.values >= ref_eval(x - zeta) - q - 1e-13))
    return _bisect_threshold(ok, -span, span, tol, want_smallest=False)


# ---------------------------------------------------------------------------
# envelope assembly and residual extrema


class _ArrayReference:
    """Reference-wave accessor backed by evolved snapshots on a common grid."""

    def __init__(self, times, x, matrix, xi_tilde):
        self.times = np.asarray(times, dtype=float)
        self.x = np.asarray(x, dtype=float)
        self.matrix = np.asarray(matrix, dtype=float)
        self.xi_tilde = xi_tilde

    def u_at(self, index, xq):
        spline = CubicSpline(self.x, self.matrix[index])
        xq = np.asarray(xq, dtype=float)
        out = np.empty_like(xq)
        left = xq < self.x[0]
        right = xq > self.x[-1]
        mid = ~(left | right)
        out[left] = 1.0
        out[right] = 0.0
        out[mid] = spline(xq[mid])
        return out


def history_reference(history: WaveHistory, xi_tilde) -> "_ArrayReference":
    x, mat = history.common_grid()
    return _ArrayReference(history.times, x, mat, xi_tilde)


class ExactReference:
    """Reference built from a closed-form traveling wave: u(t,x) =
    phi(x - c t), with the interface surrogate xi_tilde(t) = xi0 + c t."""

    def __init__(self, profile: Callable, speed: float, times: np.ndarray,
                 x: np.ndarray, xi0: float = 0.0):
        self.times = np.asarray(times, dtype=float)
        self.x = np.asarray(x, dtype=float)
        self.profile = profile
        self.speed = speed
        self.xi0 = xi0

    def u_at(self, index, xq):
        t = self.times[index]
        return np.asarray(self.profile(np.asarray(xq) - self.speed * t))

    def xi_tilde(self, t):
        return self.xi0 + self.speed * np.asarray(t)


@dataclass
class EnvelopeResiduals:
    min_plus: float  # most negative residual of the super-solution
    max_minus: float  # most positive residual of the sub-solution
    n_points: int
    q_final: float
    zeta_plus_final: float
    zeta_minus_final: float


def envelope_residuals(consts: SqueezeConstants, gamma: GammaBridge,
                       reference, shifts: tuple[float, float], q0: float,
                       horizon: float, reaction: Callable,
                       x_eval: Optional[np.ndarray] = None,
                       block: int = 64) -> EnvelopeResiduals:
    """Assemble u+- over the horizon and return extremal centered residuals.

    reference provides uniformly-spaced times, u_at(index, x) and
    xi_tilde(t); shifts are the initial trap (zeta0-, zeta0+); q0 the
    initial correction amplitude (<= epsilon0).
    """
    if not 0.0 <= q0 <= consts.epsilon0 + 1e-15:
        raise ValueError(f"q0 must lie in [0, epsilon0={consts.epsilon0:.4g}]")
    times = np.asarray(reference.times, dtype=float)
    t0 = times[0]
    if horizon > times[-1] - t0 + 1e-12:
        raise ValueError(
            f"horizon {horizon} exceeds available reference data "
            f"({times[-1] - t0:.4g})")
    n = int(np.searchsorted(times, t0 + horizon + 1e-12))
    n = max(n, 3)
    times = times[:n]
    zeta_m0, zeta_p0 = shifts
    rate = consts.M * q0 / consts.omega if q0 > 0 else 0.0

    def q(t):
        return q0 * np.exp(-consts.omega * (t - t0))

    def zeta_plus(t):
        return zeta_p0 + rate * (1.0 - np.exp(-consts.omega * (t - t0)))

    def zeta_minus(t):
        return zeta_m0 - rate * (1.0 - np.exp(-consts.omega * (t - t0)))

    if x_eval is None:
        x_eval = np.asarray(reference.x, dtype=float)
        # stay clear of the clamped tails once the shifts drift
        drift = rate * (1.0 - math.exp(-consts.omega * horizon))
        pad = max(abs(zeta_p0), abs(zeta_m0)) + drift + 2.0
        x_eval = x_eval[(x_eval > x_eval[0] + pad) & (x_eval < x_eval[-1] - pad)]

    min_plus = np.inf
    max_minus = -np.inf
    count = 0

    def assemble(i):
        t = times[i]
        zp, zm, qq = zeta_plus(t), zeta_minus(t), q(t)
        xt = float(np.asarray(reference.xi_tilde(t)))
        base_p = reference.u_at(i, x_eval - zp)
        base_m = reference.u_at(i, x_eval - zm)
        up = base_p + qq * gamma(x_eval - xt - zp)
        um = base_m - qq * gamma(x_eval - xt - zm)
        return up, um

    start = 0
    while start + 3 <= n:
        stop = min(start + block, n)
        idx = range(start, stop)
        ups = np.empty((len(idx), len(x_eval)))
        ums = np.empty_like(ups)
        for k, i in enumerate(idx):
            ups[k], ums[k] = assemble(i)
        if ups.shape[0] >= 3:
            r_up = pde_residual(ups, times[start:stop], x_eval, reaction)
            r_um = pde_residual(ums, times[start:stop], x_eval, reaction)
            min_plus = min(min_plus, float(r_up.min()))
            max_minus = max(max_minus, float(r_um.max()))
            count += r_up.size
        # overlap by 2 slices so every interior time is covered
        if stop == n:
            break
        start = stop - 2

    t_end = times[n - 1]
    return EnvelopeResiduals(
        min_plus=min_plus, max_minus=max_minus, n_points=count,
        q_final=float(q(t_end)),
        zeta_plus_final=float(zeta_plus(t_end)),
        zeta_minus_final=float(zeta_minus(t_end)))


# ---------------------------------------------------------------------------
# homogeneous-oracle calibration


def calibrate_residual_tolerance(h: float, dt: float, *, horizon: float = 5.0,
                                 a: float = 0.25, span: float = 40.0,
                                 safety: float = 2.0) -> float:
    """Grid-residual budget from the exact cubic traveling wave.

    The centered-stencil residual of the exact solution sampled at (h, dt)
    is pure discretization error, O(h^2 + dt^2); the returned tolerance is
    safety times its max over a standard space-time box.
    """
    from .homogeneous import exact_cubic_wave

    profile, speed, reaction, _ = exact_cubic_wave(a)
    times = dt * np.arange(int(horizon / dt) + 1)
    x = np.arange(-span, span + speed * horizon + h, h)
    values = profile(x[None, :] - speed * times[:, None])
    r = pde_residual(values, times, x, lambda t, u: reaction(u))
    return safety * float(np.max(np.abs(r)))


def cubic_oracle_envelope(h: float, dt: float, *, horizon: float = 20.0,
                          a: float = 0.25, alpha0: float = 0.5,
                          span: float = 70.0, snapshots: int = 12,
                          epsilon: Optional[float] = None):
    """Envelope test case on the exact cubic wave.

    Derives the constant bundle from short evolved snapshots of the wave
    (the measurement path), then assembles the envelopes around the exact
    closed-form reference so the residual carries no evolution bias.
    Returns (consts, gamma, reference, reaction, shifts, epsilon).
    """
    from .homogeneous import exact_cubic_wave
    from .nonlinearity import HomogeneousReaction
    from .pde import Grid1D, SolverConfig, evolve, step_initial_data, Field

    profile, speed, reaction, reaction_prime = exact_cubic_wave(a)
    us = np.linspace(0.0, 1.2, 2001)
    lip = float(np.max(np.abs(reaction_prime(us))))
    # ignition-analogue structure of the cubic: f <= 0 below a with
    # f' < 0 near 0, and f' <= -beta above theta_star
    theta_like = 0.2
    theta_star = 0.8
    beta = float(-reaction_prime(theta_star))
    model = HomogeneousReaction(f=reaction, lip_const=lip, theta=theta_like,
                                theta_star=theta_star, beta=beta,
                                fprime=reaction_prime)

    # measurement pass: evolve the exact wave briefly and snapshot it
    count = int(round(2 * span / h)) + 1
    grid = Grid1D(-span, h, count)
    fld = Field(grid, np.asarray(profile(grid.x)), 0.0)
    cfg = SolverConfig(dt=dt, window_width=2 * span, max_lip=lip)
    history = WaveHistory(every=max(1, int(round(1.0 / dt))))
    evolve(fld, model, cfg, snapshots * 1.0, observers=(history,),
           track_level=theta_like)
    consts, gamma = derive_constants(history, model, alpha0, c_b=speed,
                                     d_max=0.0)

    if epsilon is None:
        epsilon = consts.epsilon0
    x_anchor = float(np.sqrt(2.0) * np.log(1.0 / theta_like - 1.0))
    times = dt * np.arange(int(horizon / dt) + 1)
    x = np.arange(-span, span + speed * horizon + h, h)
    reference = ExactReference(profile, speed, times, x, xi0=x_anchor)
    shifts = (-0.5 * epsilon, 0.5 * epsilon)
    return consts, gamma, reference, lambda t, u: reaction(u), shifts, epsilon
