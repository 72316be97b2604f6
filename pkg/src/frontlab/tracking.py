"""Interface extraction: level crossings, the monotone modified interface,
front speeds, co-moving wave profiles, and tail decay rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .pde import EvolutionTrace, Field, rightmost_crossing


class NoCrossingError(ValueError):
    """The requested level is never attained by the field."""


class IncompleteTraceError(RuntimeError):
    """The interface trace ends before the envelope construction can restart."""


class DegenerateInterfaceError(RuntimeError):
    """Interface too flat for the speed formula."""


def interface_location(fld: Field, level: float) -> float:
    """Rightmost crossing of the level: largest x with u >= level, refined
    by linear interpolation between the bracketing nodes."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0,1)")
    pos = rightmost_crossing(fld.grid.x, fld.values, level)
    if pos is None:
        raise NoCrossingError(f"level {level} not attained on the window")
    return pos


# ---------------------------------------------------------------------------
# modified interface (hitting-time envelope with smoothed corners)


def _smoothstep(s):
    """Quintic smoothstep: 0->1 with zero slope and curvature at both ends."""
    return s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


def _smoothstep_d(s):
    return 30.0 * s ** 2 * (1.0 - s) ** 2


@dataclass
class ModifiedInterface:
    """Monotone Lipschitz surrogate of a wandering interface location.

    Piecewise-linear envelopes of slope c_B/2 restarted at each hitting
    time, with the restart jumps bridged by quintic ramps of width
    delta_star so the result is twice continuously differentiable.
    """

    t_start: float
    t_end: float
    c_b: float
    c0_offset: float
    delta_star: float
    hit_times: np.ndarray  # T_0 = t_start, T_1, ..., T_N
    anchors: np.ndarray  # xi(T_n) for each segment start
    d_max: float = np.nan
    slope_max: float = np.nan

    def __post_init__(self):
        self.slope_max = (0.5 * self.c_b
                          + 1.875 * self.c0_offset / self.delta_star)

    def _segment_index(self, t):
        idx = np.searchsorted(self.hit_times, t, side="right") - 1
        return np.clip(idx, 0, len(self.hit_times) - 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = self._segment_index(t)
        t_seg = self.hit_times[idx]
        base = (self.anchors[idx] + self.c0_offset
                + 0.5 * self.c_b * (t - t_seg))
        # quintic ramp ahead of each interior hitting time
        nxt = np.minimum(idx + 1, len(self.hit_times) - 1)
        t_hit = self.hit_times[nxt]
        in_ramp = (nxt > idx) & (t > t_hit - self.delta_star)
        s = np.where(in_ramp,
                     (t - (t_hit - self.delta_star)) / self.delta_star, 0.0)
        out = base + self.c0_offset * _smoothstep(np.clip(s, 0.0, 1.0))
        return out if out.ndim else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        idx = self._segment_index(t)
        nxt = np.minimum(idx + 1, len(self.hit_times) - 1)
        t_hit = self.hit_times[nxt]
        in_ramp = (nxt > idx) & (t > t_hit - self.delta_star)
        s = np.where(in_ramp,
                     (t - (t_hit - self.delta_star)) / self.delta_star, 0.0)
        out = (0.5 * self.c_b + self.c0_offset / self.delta_star
               * _smoothstep_d(np.clip(s, 0.0, 1.0)))
        return out if out.ndim else float(out)


def modified_interface(times: np.ndarray, xi: np.ndarray, c_b: float,
                       c0_offset: float,
                       delta_star: Optional[float] = None, *,
                       c_i: Optional[float] = None,
                       t_i: Optional[float] = None) -> ModifiedInterface:
    """Hitting-time envelope construction over a sampled interface trace.

    Restarting envelopes eta(t) = xi(T_n) + C0 + (c_B/2)(t - T_n) at each
    first-hitting time keeps the surrogate ahead of and within a bounded
    distance of xi.  When c_i and t_i are supplied the offset margin
    C0 > (5/4) c_i t_i is enforced.
    """
    times = np.asarray(times, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if c0_offset <= 0.0 or c_b <= 0.0:
        raise ValueError("c_b and c0_offset must be positive")
    if c_i is not None and t_i is not None:
        margin = 1.25 * c_i * t_i
        if c0_offset <= margin:
            raise ValueError(
                f"C0={c0_offset} must exceed (5/4) c_I t_I = {margin:.6g}")

    hits = [times[0]]
    anchors = [xi[0]]
    k = 0
    while True:
        t_seg, xi_seg = hits[-1], anchors[-1]
        gap = xi - (xi_seg + c0_offset + 0.5 * c_b * (times - t_seg))
        search = np.nonzero((times > t_seg) & (gap >= 0.0))[0]
        if search.size == 0:
            break
        j = search[0]
        # linear refinement of the crossing between samples j-1 and j
        g0, g1 = gap[j - 1], gap[j]
        frac = 0.0 if g1 == g0 else -g0 / (g1 - g0)
        t_hit = times[j - 1] + frac * (times[j] - times[j - 1])
        xi_hit = xi[j - 1] + frac * (xi[j] - xi[j - 1])
        hits.append(float(t_hit))
        anchors.append(float(xi_hit))
        k += 1
        if k > len(times):
            raise RuntimeError("runaway hitting-time construction")
    if len(hits) == 1:
        raise IncompleteTraceError(
            f"no hitting time up to t={times[-1]:.6g}; trace too short for "
            f"the propagation lower bound")

    gaps = np.diff(hits)
    if delta_star is None:
        delta_star = 0.25 * float(gaps.min())
    if delta_star <= 0.0 or delta_star >= 0.5 * gaps.min():
        raise ValueError(
            f"delta_star must lie in (0, {0.5 * gaps.min():.6g})")

    mod = ModifiedInterface(
        t_start=float(times[0]), t_end=float(times[-1]), c_b=c_b,
        c0_offset=c0_offset, delta_star=float(delta_star),
        hit_times=np.asarray(hits), anchors=np.asarray(anchors))
    diffs = mod(times) - xi
    mod.d_max = float(diffs.max())
    if diffs.min() < -1e-9:
        raise RuntimeError(
            f"envelope dipped below the interface by {-diffs.min():.3e}")
    return mod


# ---------------------------------------------------------------------------
# wave profiles


@dataclass
class WaveProfileSnapshot:
    """The solution in the frame of its interface: psi(t,x) = u(t, x + xi)."""

    offsets: np.ndarray
    values: np.ndarray
    time: float
    xi: float

    @property
    def center_index(self) -> int:
        idx = int(np.argmin(np.abs(self.offsets)))
        if abs(self.offsets[idx]) > 1e-9:
            raise ValueError("profile offsets do not contain 0")
        return idx

    def interpolator(self) -> PchipInterpolator:
        return PchipInterpolator(self.offsets, self.values, extrapolate=False)


def extract_profile(fld: Field, xi: float,
                    half_width: Optional[float] = None) -> WaveProfileSnapshot:
    """Resample the field onto offsets centered at xi (monotone cubic)."""
    grid = fld.grid
    margin = 2 * grid.h
    avail = min(xi - grid.left, grid.right - xi) - margin
    if avail <= 4 * grid.h:
        raise ValueError(
            f"xi={xi:.4f} too close to the window edge for profile "
            f"extraction")
    if half_width is None:
        half_width = avail
    elif half_width > avail:
        raise ValueError(f"half_width {half_width} exceeds available {avail:.4f}")
    n = int(math.floor(half_width / grid.h))
    offsets = grid.h * np.arange(-n, n + 1)
    interp = PchipInterpolator(grid.x, fld.values, extrapolate=False)
    values = interp(offsets + xi)
    return WaveProfileSnapshot(offsets=offsets, values=values,
                               time=fld.time, xi=xi)


def speed_at_interface(profile: WaveProfileSnapshot, model,
                       level_offset: float = 0.0,
                       steepness_floor: float = 1e-3) -> float:
    """Instantaneous front velocity from the profile equation:
    xi_dot = -(psi_xx + f(t, psi)) / psi_x evaluated at the interface."""
    h = profile.offsets[1] - profile.offsets[0]
    if level_offset == 0.0:
        i = profile.center_index
    else:
        i = int(np.argmin(np.abs(profile.offsets - level_offset)))
        if abs(profile.offsets[i] - level_offset) > 1e-9:
            raise ValueError("level_offset must align with the profile grid")
    if i < 2 or i > len(profile.values) - 3:
        raise ValueError("interface too close to the profile edge")
    p = profile.values
    psi_x = (-p[i + 2] + 8 * p[i + 1] - 8 * p[i - 1] + p[i - 2]) / (12 * h)
    psi_xx = (-p[i + 2] + 16 * p[i + 1] - 30 * p[i] + 16 * p[i - 1]
              - p[i - 2]) / (12 * h * h)
    if abs(psi_x) < steepness_floor:
        raise DegenerateInterfaceError(
            f"|psi_x|={abs(psi_x):.3e} below the steepness floor "
            f"{steepness_floor}")
    f_val = float(np.asarray(model.reaction(profile.time, p[i])))
    return float(-(psi_xx + f_val) / psi_x)


@dataclass
class TailFit:
    rate: float
    prefactor: float
    residual: float  # RMS of log-residuals
    stderr: float  # standard error of the rate
    n_points: int


def fit_exponential_tail(profile: WaveProfileSnapshot, x_lo: float,
                         x_hi: float) -> TailFit:
    """Least-squares line fit of log psi against x on [x_lo, x_hi]."""
    if x_lo < 0.0:
        raise ValueError("tail range must sit ahead of the interface (x_lo >= 0)")
    if x_hi <= x_lo:
        raise ValueError("empty tail range")
    mask = (profile.offsets >= x_lo) & (profile.offsets <= x_hi)
    xs = profile.offsets[mask]
    ys = profile.values[mask]
    if len(xs) < 3:
        raise ValueError("tail range contains fewer than 3 samples")
    if np.any(ys <= 0.0):
        raise ValueError("tail range contains nonpositive samples")
    logy = np.log(ys)
    A = np.vstack([xs, np.ones_like(xs)]).T
    coef, res, _, _ = np.linalg.lstsq(A, logy, rcond=None)
    slope, intercept = coef
    fitted = A @ coef
    rms = float(np.sqrt(np.mean((logy - fitted) ** 2)))
    dof = max(len(xs) - 2, 1)
    sigma2 = float(np.sum((logy - fitted) ** 2)) / dof
    sxx = float(np.sum((xs - xs.mean()) ** 2))
    stderr = math.sqrt(sigma2 / sxx) if sxx > 0 else float("inf")
    return TailFit(rate=float(-slope), prefactor=float(np.exp(intercept)),
                   residual=rms, stderr=stderr, n_points=len(xs))


# ---------------------------------------------------------------------------
# assembled trace


@dataclass
class FrontTrace:
    """Time series of interface data for one evolution."""

    times: np.ndarray
    xi_by_level: dict
    theta: float
    xi_tilde: Optional[np.ndarray] = None
    speed_formula: Optional[np.ndarray] = None
    d_max: float = np.nan
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_evolution(cls, trace: EvolutionTrace, theta: float) -> "FrontTrace":
        times, xi = trace.arrays()
        if theta not in xi:
            raise KeyError(f"evolution trace lacks level {theta}")
        return cls(times=times, xi_by_level=xi, theta=theta)

    @property
    def xi_theta(self) -> np.ndarray:
        return self.xi_by_level[self.theta]

    @property
    def speed_fd(self) -> np.ndarray:
        """Centered finite-difference speed of the theta-interface."""
        return np.gradient(self.xi_theta, self.times)

    def attach_modified(self, mod: ModifiedInterface):
        self.xi_tilde = np.asarray(mod(self.times))
        self.d_max = mod.d_max

    def level_ordering_violations(self) -> int:
        """Count of (time, level-pair) entries violating the monotone
        ordering lambda1 < lambda2 => xi_lambda1 >= xi_lambda2."""
        levels = sorted(self.xi_by_level)
        bad = 0
        for lo, hi in zip(levels, levels[1:]):
            a, b = self.xi_by_level[lo], self.xi_by_level[hi]
            ok = np.isfinite(a) & np.isfinite(b)
            bad += int(np.sum(a[ok] < b[ok] - 1e-9))
        return bad

    def to_csv(self, path):
        cols = [self.times, self.xi_theta]
        names = ["t", "xi_theta"]
        if self.xi_tilde is not None:
            cols.append(self.xi_tilde)
            names.append("xi_tilde")
        if self.speed_formula is not None:
            cols.append(self.speed_formula)
            names.append("speed_formula")
        cols.append(self.speed_fd)
        names.append("speed_fd")
        for lam in sorted(self.xi_by_level):
            if lam != self.theta:
                cols.append(self.xi_by_level[lam])
                names.append(f"xi_{lam:g}")
        data = np.column_stack(cols)
        np.savetxt(path, data, delimiter=",", header=",".join(names),
                   comments="", fmt="%.17g")
