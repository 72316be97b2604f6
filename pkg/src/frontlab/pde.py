"""IMEX evolution of u_t = u_xx + f(t,u) on a uniform moving window.

Diffusion is implicit (tridiagonal Cholesky solve), the reaction explicit,
and the edge nodes are held fixed during a step.  Under dt <= 1/C_Lip the
explicit reaction map u -> u + dt f(t,u) is nondecreasing in u and the
implicit diffusion matrix is an M-matrix, so the scheme preserves nodewise
ordering of solutions -- the discrete comparison principle the envelope
and squeezing experiments rely on.

The window recenters by whole cells when the tracked interface drifts off
center; entrant cells are filled with the Dirichlet pair (1 left, 0 right).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded


class ConfigError(ValueError):
    """Solver configuration violates a scheme invariant."""


class WindowError(RuntimeError):
    """The moving window cannot contain the front."""


@dataclass(frozen=True)
class Grid1D:
    left: float
    h: float
    count: int

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if self.count < 16:
            raise ValueError("grid needs at least 16 nodes")

    @property
    def x(self) -> np.ndarray:
        return self.left + self.h * np.arange(self.count)

    @property
    def right(self) -> float:
        return self.left + self.h * (self.count - 1)

    def shifted(self, cells: int) -> "Grid1D":
        return replace(self, left=self.left + cells * self.h)


@dataclass
class Field:
    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.count,):
            raise ValueError("values must match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.time)


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    window_width: float = 160.0
    recenter_threshold: int = 4  # cells
    boundary: str = "dirichlet_1_0"
    max_lip: float = 1.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.boundary != "dirichlet_1_0":
            raise ConfigError(f"unsupported boundary {self.boundary!r}")
        if self.dt > 1.0 / self.max_lip:
            raise ConfigError(
                f"dt={self.dt} exceeds the comparison bound 1/C_Lip="
                f"{1.0 / self.max_lip:.6g}")


def default_dt(h: float, c_lip: float) -> float:
    """Default step: keeps temporal error below spatial, respects 1/C_Lip."""
    return min(0.2 * h, 0.5 / c_lip)


class _DiffusionSolver:
    """Cached Cholesky factorization of I - dt*Laplacian on interior nodes."""

    def __init__(self, n_interior: int, r: float):
        ab = np.zeros((2, n_interior))
        ab[0, 1:] = -r
        ab[1, :] = 1.0 + 2.0 * r
        self.r = r
        self.cb = cholesky_banded(ab, lower=False)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self.cb, False), rhs)


_solver_cache: dict[tuple[int, float], _DiffusionSolver] = {}


def _diffusion_solver(n_interior: int, r: float) -> _DiffusionSolver:
    key = (n_interior, round(r, 14))
    if key not in _solver_cache:
        if len(_solver_cache) > 64:
            _solver_cache.clear()
        _solver_cache[key] = _DiffusionSolver(n_interior, r)
    return _solver_cache[key]


def step_values(values: np.ndarray, t: float, dt: float, h: float,
                reaction: Callable) -> np.ndarray:
    """One IMEX step on raw values; edge rows are held fixed.

    Accepts a single state (n,) or a batch (n, k) advanced with the same
    reaction clock.
    """
    r = dt / (h * h)
    solver = _diffusion_solver(values.shape[0] - 2, r)
    interior = values[1:-1]
    rhs = interior + dt * reaction(t, interior)
    rhs = np.asarray(rhs, dtype=float).copy()
    rhs[0] += r * values[0]
    rhs[-1] += r * values[-1]
    out = np.empty_like(values, dtype=float)
    out[0] = values[0]
    out[-1] = values[-1]
    out[1:-1] = solver.solve(rhs)
    return out


def step(fld: Field, model, cfg: SolverConfig) -> Field:
    """Advance one IMEX step: implicit diffusion, explicit reaction."""
    if cfg.dt > 1.0 / model.lip_const:
        raise ConfigError(
            f"dt={cfg.dt} exceeds 1/C_Lip={1.0 / model.lip_const:.6g} "
            "for this model")
    new_values = step_values(fld.values, fld.time, cfg.dt, fld.grid.h,
                             model.reaction)
    return Field(fld.grid, new_values, fld.time + cfg.dt)


def rightmost_crossing(x: np.ndarray, values: np.ndarray,
                       level: float) -> Optional[float]:
    """Largest position where values crosses level from above, by linear
    interpolation between the bracketing nodes; None when never attained."""
    above = values >= level
    if not above.any() or above.all():
        return None
    idx = np.nonzero(above)[0][-1]
    if idx == len(values) - 1:
        return None
    u0, u1 = values[idx], values[idx + 1]
    frac = (u0 - level) / (u0 - u1)
    return float(x[idx] + frac * (x[idx + 1] - x[idx]))


@dataclass
class EvolutionTrace:
    """Raw per-step interface record produced by evolve."""

    levels: tuple[float, ...]
    times: list = field(default_factory=list)
    xi: dict = field(default_factory=dict)  # level -> list of positions
    edge_drift: float = 0.0  # max deviation of held edges from (1, 0)

    def __post_init__(self):
        for lam in self.levels:
            self.xi.setdefault(lam, [])

    def record(self, fld: Field):
        self.times.append(fld.time)
        x = fld.grid.x
        for lam in self.levels:
            pos = rightmost_crossing(x, fld.values, lam)
            self.xi[lam].append(np.nan if pos is None else pos)
        self.edge_drift = max(self.edge_drift,
                              abs(fld.values[0] - 1.0),
                              abs(fld.values[-1]))

    def arrays(self):
        times = np.asarray(self.times)
        return times, {lam: np.asarray(v) for lam, v in self.xi.items()}


def evolve(fld: Field, model, cfg: SolverConfig, until: float,
           observers: Sequence[Callable] = (),
           levels: Sequence[float] = (),
           track_level: Optional[float] = None,
           record_every: int = 1) -> tuple[Field, EvolutionTrace]:
    """Evolve to the requested time with window recentring.

    The tracked level (default: the model's ignition temperature when it
    has one, else the first requested level) controls recentring; when its
    crossing drifts more than recenter_threshold cells off the window
    center the grid shifts by whole cells, filling entrant cells with the
    Dirichlet values.  Observers receive every accepted state.
    """
    if until <= fld.time:
        raise ValueError("until must exceed the field's current time")
    if track_level is None:
        track_level = getattr(model, "theta", None)
        if track_level is None:
            track_level = levels[0] if levels else 0.5
    lam_list = tuple(levels) if levels else (track_level,)
    trace = EvolutionTrace(levels=lam_list)
    trace.record(fld)
    for obs in observers:
        obs(fld)

    current = fld
    n_steps = int(round((until - fld.time) / cfg.dt))
    guard = 10  # cells
    for k in range(n_steps):
        current = step(current, model, cfg)
        xi = rightmost_crossing(current.grid.x, current.values, track_level)
        if xi is not None:
            grid = current.grid
            if (xi - grid.left < guard * grid.h
                    or grid.right - xi < guard * grid.h):
                raise WindowError(
                    f"interface {xi:.3f} within {guard} cells of the window "
                    f"edge [{grid.left:.3f}, {grid.right:.3f}]")
            center = 0.5 * (grid.left + grid.right)
            drift_cells = (xi - center) / grid.h
            if abs(drift_cells) > cfg.recenter_threshold:
                shift = int(np.round(drift_cells))
                current = _shift_window(current, shift)
        if (k + 1) % record_every == 0 or k == n_steps - 1:
            trace.record(current)
        for obs in observers:
            obs(current)
    return current, trace


def _shift_window(fld: Field, cells: int) -> Field:
    values = np.empty_like(fld.values)
    if cells > 0:
        values[:-cells] = fld.values[cells:]
        values[-cells:] = 0.0
    elif cells < 0:
        values[-cells:] = fld.values[:cells]
        values[:-cells] = 1.0
    else:
        return fld
    return Field(fld.grid.shifted(cells), values, fld.time)


@dataclass
class WaveHistory:
    """Decimated snapshot record of an evolution, for envelope assembly."""

    every: int
    times: list = field(default_factory=list)
    lefts: list = field(default_factory=list)
    values: list = field(default_factory=list)
    h: Optional[float] = None
    _counter: int = 0

    def __call__(self, fld: Field):
        if self._counter % self.every == 0:
            self.times.append(fld.time)
            self.lefts.append(fld.grid.left)
            self.values.append(fld.values.copy())
            self.h = fld.grid.h
        self._counter += 1

    def __len__(self):
        return len(self.times)

    def common_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Values re-indexed onto the nodes shared by every snapshot.

        Recentring shifts by whole cells, so shared nodes are exact
        sub-slices; no interpolation happens here.
        """
        h = self.h
        left = max(self.lefts)
        right = min(l + h * (len(v) - 1) for l, v in zip(self.lefts, self.values))
        if right <= left:
            raise WindowError("snapshots share no common window")
        n = int(round((right - left) / h)) + 1
        x = left + h * np.arange(n)
        out = np.empty((len(self.times), n))
        for i, (l, v) in enumerate(zip(self.lefts, self.values)):
            start = int(round((left - l) / h))
            out[i] = v[start:start + n]
        return x, out

    def snapshot(self, i: int) -> Field:
        grid = Grid1D(self.lefts[i], self.h, len(self.values[i]))
        return Field(grid, self.values[i].copy(), self.times[i])


def pde_residual(values: np.ndarray, times: np.ndarray, x: np.ndarray,
                 reaction: Callable) -> np.ndarray:
    """Centered-difference parabolic residual R = D_t u - D_xx u - f(t,u).

    values has shape (nt, nx) on uniform times and grid; the result covers
    the interior (nt-2, nx-2) stencil points.  Used for sign-checking
    candidate super/sub-solutions.
    """
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    x = np.asarray(x, dtype=float)
    if values.ndim != 2 or values.shape[0] < 3:
        raise ValueError("need at least 3 time slices")
    if values.shape != (len(times), len(x)):
        raise ValueError("values shape must be (len(times), len(x))")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12):
        raise ValueError("time slices must be uniformly spaced")
    dt = dts[0]
    h = x[1] - x[0]
    du_dt = (values[2:, 1:-1] - values[:-2, 1:-1]) / (2.0 * dt)
    d2u = (values[1:-1, 2:] - 2.0 * values[1:-1, 1:-1]
           + values[1:-1, :-2]) / (h * h)
    f_mid = np.empty_like(du_dt)
    for i, t in enumerate(times[1:-1]):
        f_mid[i] = reaction(t, values[i + 1, 1:-1])
    return du_dt - d2u - f_mid


def step_initial_data(grid: Grid1D, jump_at: float = 0.0) -> Field:
    """Sharp step: 1 left of the jump, 0 to the right."""
    values = np.where(grid.x <= jump_at, 1.0, 0.0)
    return Field(grid, values.astype(float), 0.0)


def smooth_front_initial_data(grid: Grid1D, center: float = 0.0,
                              width: float = 2.0) -> Field:
    """Smoothed decreasing front based on a logistic ramp."""
    values = 1.0 / (1.0 + np.exp((grid.x - center) / width))
    return Field(grid, values, 0.0)
