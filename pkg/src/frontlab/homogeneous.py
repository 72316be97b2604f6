"""Traveling waves of the homogeneous comparison equations.

Two wave kinds anchor the front-tracking bounds: the bistable wave of
u_t = u_xx + f_B(u) connecting 1 to 0 with speed c_B, and the floored
ignition wave of u_t = u_xx + f_I(u) connecting 1 to theta_I with speed
c_I.  Both are found by phase-plane shooting from the saddle at (1,0)
with bisection on the speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp


class ShootingError(RuntimeError):
    """Speed bracket failed to capture a sign change."""


@dataclass
class HomogeneousWave:
    speed: float
    x: np.ndarray  # symmetric grid
    phi: np.ndarray  # monotone decreasing profile samples
    left_limit: float
    right_limit: float
    kind: str  # bistable | ignition_floor
    residual: float  # phase-plane endpoint distance at the returned speed
    anchor_level: float  # phi(0)

    def __call__(self, xq):
        """Profile evaluated by interpolation, clamped to the limits outside."""
        return np.interp(xq, self.x, self.phi,
                         left=self.left_limit, right=self.right_limit)

    def to_csv(self, path):
        data = np.column_stack([self.x, self.phi])
        np.savetxt(path, data, delimiter=",", header="x,phi", comments="",
                   fmt="%.17g")


def _derivative(f: Callable, fprime: Optional[Callable]):
    if fprime is not None:
        return fprime
    h = 1e-7

    def num(u):
        return (f(u + h) - f(u - h)) / (2.0 * h)

    return num


def _unstable_eigenvalue(c: float, b1: float) -> float:
    """Positive eigenvalue at the saddle (1,0): mu^2 + c mu - b1 = 0."""
    return 0.5 * (-c + np.sqrt(c * c + 4.0 * b1))


def _shoot(f: Callable, c: float, target: float, b1: float, rtol: float,
           x_max: Optional[float] = None):
    """Integrate the orbit leaving (1,0) until it resolves against (target,0).

    Integration runs in the spatial variable, so the system phi' = v,
    v' = -c v - f(phi) is never stiff.  The sign of the return value
    classifies the shot: negative = overshoot (orbit crosses phi = target
    with v < 0, speed too small), positive = undershoot (v turns to zero
    at phi > target, speed too large).
    """
    delta0 = 1e-7
    mu = _unstable_eigenvalue(c, b1)
    if x_max is None:
        # leave room for the slow departure from the saddle at heavy damping
        x_max = 400.0 + 60.0 / mu
    y0 = [1.0 - delta0, -mu * delta0]

    def rhs(x, y):
        return [y[1], -c * y[1] - f(y[0])]

    def reached(x, y):
        return y[0] - target

    reached.terminal = True
    reached.direction = -1

    def turned(x, y):
        # offset above integrator noise so asymptotic v -> 0- does not trip it
        return y[1] - 1e-8

    turned.terminal = True
    turned.direction = 1

    sol = solve_ivp(rhs, (0.0, x_max), y0, events=[reached, turned],
                    rtol=rtol, atol=1e-14, method="RK45", max_step=1.0)
    if not sol.success:
        raise ShootingError(f"shooting integration failed at c={c}: {sol.message}")
    if sol.t_events[0].size:  # crossed the target level
        return float(sol.y_events[0][0][1])
    if sol.t_events[1].size:  # turned before reaching it
        phi_stop = float(sol.y_events[1][0][0])
        return phi_stop - target
    phi_end, v_end = float(sol.y[0, -1]), float(sol.y[1, -1])
    if v_end >= -1e-4:
        # the orbit stalled (v -> 0- is asymptotic where the reaction is
        # flat or at an interior equilibrium, so no event fires); the
        # signed stall gap extrapolated along dv/dphi = -c classifies it
        return (phi_end - target) + (v_end / c if c > 1e-9 else 0.0)
    raise ShootingError(
        f"orbit undecided at x={x_max:.0f} for c={c}: "
        f"(phi, v) = ({phi_end:.4g}, {v_end:.4g})")


def _bisect_speed(f, target, b1, bracket, tolerance, ivp_rtol=1e-10):
    c_lo, c_hi = bracket
    r_lo = _shoot(f, c_lo, target, b1, rtol=ivp_rtol)
    r_hi = _shoot(f, c_hi, target, b1, rtol=ivp_rtol)
    if r_lo > 0.0:
        # already undershooting at the smallest speed: the true speed is at
        # or below the bracket; accept c = 0 when it connects (the zero-speed
        # connection is resolvable only to manifold-offset precision)
        r0 = _shoot(f, 0.0, target, b1, rtol=ivp_rtol)
        if abs(r0) < max(tolerance, 1e-5):
            return 0.0, abs(r0)
        raise ShootingError(
            f"no sign change in speed bracket {bracket}: "
            f"residuals ({r_lo:.3e}, {r_hi:.3e})")
    if r_hi < 0.0:
        raise ShootingError(
            f"no sign change in speed bracket {bracket}: "
            f"residuals ({r_lo:.3e}, {r_hi:.3e})")
    residual = min(abs(r_lo), abs(r_hi))
    for _ in range(200):
        c_mid = 0.5 * (c_lo + c_hi)
        r_mid = _shoot(f, c_mid, target, b1, rtol=ivp_rtol)
        residual = abs(r_mid)
        if r_mid < 0.0:
            c_lo = c_mid
        else:
            c_hi = c_mid
        if residual < tolerance and (c_hi - c_lo) < tolerance:
            return c_mid, residual
    return 0.5 * (c_lo + c_hi), residual


def _integrate_profile(f, c, target, b1, anchor_level, h=0.02, tail_eps=1e-7):
    """Sample the wave profile on a symmetric uniform grid with phi(0) anchored."""
    def rhs(x, y):
        return [y[1], -c * y[1] - f(y[0])]

    delta0 = 1e-7
    mu = _unstable_eigenvalue(c, b1)
    y_left = [1.0 - delta0, -mu * delta0]

    # march right from just below the left state until the anchor level
    def hit_anchor(x, y):
        return y[0] - anchor_level

    hit_anchor.terminal = True
    sol = solve_ivp(rhs, (0.0, 500.0), y_left, events=hit_anchor,
                    rtol=1e-11, atol=1e-13, max_step=0.5)
    if sol.status != 1:
        raise ShootingError("profile integration never reached the anchor level")
    y_anchor = [float(sol.y_events[0][0][0]), float(sol.y_events[0][0][1])]

    # forward: down to the right limit (also stop if residual drift makes
    # the orbit turn before reaching the tail band)
    def near_right(x, y):
        return y[0] - (target + tail_eps)

    near_right.terminal = True

    def turned_up(x, y):
        return y[1] - 1e-8

    turned_up.terminal = True
    turned_up.direction = 1

    fwd = solve_ivp(rhs, (0.0, 500.0), y_anchor, events=[near_right, turned_up],
                    rtol=1e-11, atol=1e-13, max_step=0.5, dense_output=True)
    # backward: up to the left limit
    def near_left(x, y):
        return y[0] - (1.0 - tail_eps)

    near_left.terminal = True
    bwd = solve_ivp(rhs, (0.0, -500.0), y_anchor, events=near_left,
                    rtol=1e-11, atol=1e-13, max_step=0.5, dense_output=True)

    x_right = float(fwd.t[-1])
    x_left = float(bwd.t[-1])
    half = max(abs(x_left), abs(x_right))
    n = int(np.ceil(half / h))
    xs = np.arange(-n, n + 1) * h
    phi = np.empty_like(xs)
    left_mask = xs < x_left
    right_mask = xs > x_right
    mid_bwd = (xs >= x_left) & (xs < 0)
    mid_fwd = (xs >= 0) & (xs <= x_right)
    phi[left_mask] = 1.0
    phi[right_mask] = target
    if mid_bwd.any():
        phi[mid_bwd] = bwd.sol(xs[mid_bwd])[0]
    if mid_fwd.any():
        phi[mid_fwd] = fwd.sol(xs[mid_fwd])[0]
    # clip stray integrator noise beyond the limits
    phi = np.clip(phi, target, 1.0)
    return xs, phi


def _detect_positive_support_start(f, lo=0.0, hi=1.0):
    """Largest u0 with f <= 0 on (lo, u0): the ignition-temperature analogue."""
    us = np.linspace(lo + 1e-9, hi - 1e-9, 4001)
    vals = np.asarray(f(us))
    pos = np.nonzero(vals > 1e-13)[0]
    if len(pos) == 0:
        raise ShootingError("reaction has no positive part on (0,1)")
    return float(us[pos[0]])


def solve_bistable_wave(f_B: Callable, tolerance: float = 1e-8, *,
                        fprime: Optional[Callable] = None,
                        speed_bracket: tuple[float, float] = (1e-4, 10.0),
                        anchor_level: Optional[float] = None,
                        profile_h: float = 0.02,
                        ivp_rtol: float = 1e-10) -> HomogeneousWave:
    """Unique speed and profile of the bistable wave connecting 1 to 0.

    Shooting: integrate the unstable manifold of the saddle (1,0) in the
    phase plane and bisect the speed on over/undershoot of (0,0).
    """
    fp = _derivative(f_B, fprime)
    b1 = float(-fp(1.0))
    if b1 <= 0.0:
        raise ShootingError("reaction must have negative slope at u=1")
    if anchor_level is None:
        theta_like = _detect_positive_support_start(f_B)
        anchor_level = 0.5 * (1.0 + theta_like)
    c, residual = _bisect_speed(f_B, 0.0, b1, speed_bracket, tolerance,
                                ivp_rtol=ivp_rtol)
    xs, phi = _integrate_profile(f_B, c, 0.0, b1, anchor_level, h=profile_h)
    return HomogeneousWave(speed=c, x=xs, phi=phi, left_limit=1.0,
                           right_limit=0.0, kind="bistable",
                           residual=residual, anchor_level=anchor_level)


def exact_cubic_wave(a: float = 0.25):
    """Closed-form traveling wave of u_t = u_xx + u(1-u)(u-a).

    Returns (profile, speed, reaction, reaction_prime): the logistic-form
    profile solves the wave equation exactly with speed (1-2a)/sqrt(2).
    """
    speed = (1.0 - 2.0 * a) / np.sqrt(2.0)

    def profile(x):
        return 1.0 / (1.0 + np.exp(np.clip(np.asarray(x, dtype=float)
                                           / np.sqrt(2.0), -500, 500)))

    def reaction(u):
        return u * (1.0 - u) * (u - a)

    def reaction_prime(u):
        return -3.0 * u ** 2 + 2.0 * (1.0 + a) * u - a

    return profile, speed, reaction, reaction_prime


def solve_ignition_floor_wave(f_I: Callable, theta_I: float,
                              tolerance: float = 1e-8, *,
                              theta: Optional[float] = None,
                              fprime: Optional[Callable] = None,
                              speed_bracket: tuple[float, float] = (1e-4, 10.0),
                              profile_h: float = 0.02,
                              ivp_rtol: float = 1e-10) -> HomogeneousWave:
    """Unique speed and profile of the ignition wave connecting 1 to theta_I.

    f_I vanishes on [0, theta]; theta_I must sit strictly below theta so the
    right equilibrium is in the flat region.
    """
    if theta is None:
        theta = _detect_positive_support_start(f_I)
    if not 0.0 <= theta_I < theta:
        raise ValueError(f"theta_I={theta_I} must lie in [0, theta={theta})")
    fp = _derivative(f_I, fprime)
    b1 = float(-fp(1.0))
    if b1 <= 0.0:
        raise ShootingError("reaction must have negative slope at u=1")
    anchor_level = 0.5 * (1.0 + theta_I)
    c, residual = _bisect_speed(f_I, theta_I, b1, speed_bracket, tolerance,
                                ivp_rtol=ivp_rtol)
    xs, phi = _integrate_profile(f_I, c, theta_I, b1, anchor_level, h=profile_h)
    return HomogeneousWave(speed=c, x=xs, phi=phi, left_limit=1.0,
                           right_limit=theta_I, kind="ignition_floor",
                           residual=residual, anchor_level=anchor_level)
