"""Structured run configuration: a single JSON document with model,
solver and experiment sections.  Unknown keys are rejected with a
suggestion; defaults are applied and echoed back for provenance."""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .nonlinearity import (ForcingComponent, ForcingSignal,
                           IgnitionNonlinearity, SHAPE_REGISTRY)
from .pde import default_dt


class ConfigValidationError(ValueError):
    """Configuration rejected; the message names the offending key path."""


_MODEL_KEYS = {"theta", "theta_star", "shape", "forcing"}
_FORCING_KEYS = {"kind", "base_level", "components", "seed"}
_COMPONENT_KEYS = {"frequency", "amplitude", "phase"}
_SOLVER_KEYS = {"h", "dt", "window_width", "recenter_threshold"}
_EXPERIMENT_KEYS = {"kind", "params"}
_TOP_KEYS = {"model", "solver", "experiment", "output", "seed"}

_EXPERIMENT_KINDS = {"stability", "uniqueness", "monotonicity", "recurrence",
                     "speed"}


def _check_keys(section: dict, allowed: set, path: str):
    for key in section:
        if key not in allowed:
            hint = difflib.get_close_matches(key, allowed, n=1)
            suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ConfigValidationError(
                f"unknown key {path}.{key}{suggestion}")


def _require_positive(value, path: str):
    if not isinstance(value, (int, float)) or value <= 0:
        raise ConfigValidationError(f"{path} must be a positive number, "
                                    f"got {value!r}")


@dataclass
class RunConfig:
    model: IgnitionNonlinearity
    h: float = 0.05
    dt: Optional[float] = None
    window_width: float = 160.0
    recenter_threshold: int = 4
    experiment_kind: str = "stability"
    experiment_params: dict = field(default_factory=dict)
    output: str = "runs/out"
    seed: int = 0

    @property
    def dt_effective(self) -> float:
        if self.dt is not None:
            return self.dt
        return default_dt(self.h, self.model.lip_const)

    def echo(self) -> dict:
        """The fully-defaulted configuration document."""
        forcing = self.model.forcing
        return {
            "model": {
                "theta": self.model.theta,
                "theta_star": self.model.theta_star,
                "shape": self.model.shape,
                "forcing": {
                    "kind": forcing.kind,
                    "base_level": forcing.base_level,
                    "components": [
                        {"frequency": c.frequency, "amplitude": c.amplitude,
                         "phase": c.phase}
                        for c in forcing.components],
                },
            },
            "solver": {
                "h": self.h,
                "dt": self.dt_effective,
                "window_width": self.window_width,
                "recenter_threshold": self.recenter_threshold,
            },
            "experiment": {
                "kind": self.experiment_kind,
                "params": dict(self.experiment_params),
            },
            "output": self.output,
            "seed": self.seed,
        }


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigValidationError("configuration root must be an object")
    _check_keys(doc, _TOP_KEYS, "$")

    model_doc = doc.get("model", {})
    _check_keys(model_doc, _MODEL_KEYS, "model")
    theta = model_doc.get("theta", 0.25)
    theta_star = model_doc.get("theta_star", 0.75)
    _require_positive(theta, "model.theta")
    _require_positive(theta_star, "model.theta_star")
    shape = model_doc.get("shape", "quadratic_ignition")
    if shape not in SHAPE_REGISTRY:
        hint = difflib.get_close_matches(shape, SHAPE_REGISTRY, n=1)
        suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigValidationError(f"model.shape {shape!r} unknown{suggestion}")

    forcing_doc = model_doc.get("forcing", {})
    _check_keys(forcing_doc, _FORCING_KEYS, "model.forcing")
    kind = forcing_doc.get("kind", "periodic")
    base = forcing_doc.get("base_level", 1.0)
    _require_positive(base, "model.forcing.base_level")
    comps_doc = forcing_doc.get("components", None)
    if comps_doc is None:
        comps_doc = ([] if kind == "constant" else
                     [{"frequency": 1.0, "amplitude": 0.25, "phase": 0.0}])
    comps = []
    for i, c in enumerate(comps_doc):
        _check_keys(c, _COMPONENT_KEYS, f"model.forcing.components[{i}]")
        comps.append((float(c.get("frequency", 1.0)),
                      float(c.get("amplitude", 0.0)),
                      float(c.get("phase", 0.0))))
    if kind == "random_phase_sum":
        seed = forcing_doc.get("seed", doc.get("seed", 0))
        forcing = ForcingSignal.random_phase_sum(
            base, [c[0] for c in comps], [c[1] for c in comps], seed)
    else:
        forcing = ForcingSignal(
            kind, base, tuple(ForcingComponent(f, a, p) for f, a, p in comps))
    if forcing.g_min <= 0.0:
        raise ConfigValidationError(
            f"model.forcing: lower bound base_level - sum|amplitudes| = "
            f"{forcing.g_min:.6g} must be positive")

    try:
        model = IgnitionNonlinearity(theta=theta, theta_star=theta_star,
                                     forcing=forcing, shape=shape)
    except ValueError as exc:
        raise ConfigValidationError(f"model: {exc}") from exc

    solver_doc = doc.get("solver", {})
    _check_keys(solver_doc, _SOLVER_KEYS, "solver")
    h = solver_doc.get("h", 0.05)
    _require_positive(h, "solver.h")
    dt = solver_doc.get("dt", None)
    if dt is not None:
        _require_positive(dt, "solver.dt")
        bound = 1.0 / model.lip_const
        if dt > bound:
            raise ConfigValidationError(
                f"solver.dt={dt} violates the comparison-principle bound "
                f"dt <= 1/C_Lip = {bound:.6g}")
    window = solver_doc.get("window_width", 160.0)
    _require_positive(window, "solver.window_width")
    recenter = solver_doc.get("recenter_threshold", 4)
    _require_positive(recenter, "solver.recenter_threshold")

    exp_doc = doc.get("experiment", {})
    _check_keys(exp_doc, _EXPERIMENT_KEYS, "experiment")
    exp_kind = exp_doc.get("kind", "stability")
    if exp_kind not in _EXPERIMENT_KINDS:
        hint = difflib.get_close_matches(exp_kind, _EXPERIMENT_KINDS, n=1)
        suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigValidationError(
            f"experiment.kind {exp_kind!r} unknown{suggestion}")
    params = exp_doc.get("params", {})
    if not isinstance(params, dict):
        raise ConfigValidationError("experiment.params must be an object")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigValidationError("seed must be an integer")

    return RunConfig(model=model, h=float(h), dt=dt,
                     window_width=float(window),
                     recenter_threshold=int(recenter),
                     experiment_kind=exp_kind,
                     experiment_params=dict(params),
                     output=doc.get("output", "runs/out"), seed=seed)


def load_config(path) -> RunConfig:
    """Parse and validate the JSON run configuration at path."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigValidationError(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    try:
        return parse_config(doc)
    except ConfigValidationError as exc:
        raise ConfigValidationError(f"{path}: {exc}") from exc
