"""Shared fixtures; the heavy evolutions are session-scoped so module tests
and the acceptance suite reuse one burned-in reference."""

import numpy as np
import pytest

from frontlab import pde
from frontlab.experiments import (ExperimentSpec, burn_in, run_stability,
                                  run_uniqueness, wave_anchors)
from frontlab.nonlinearity import DEFAULT_MODEL


# independent closed-form oracle for the cubic bistable wave: the logistic
# profile solves phi'' + c phi' + phi(1-phi)(phi-a) = 0 with c = (1-2a)/sqrt2
CUBIC_A = 0.25
CUBIC_SPEED = (1.0 - 2.0 * CUBIC_A) / np.sqrt(2.0)


def cubic_reaction(u):
    return u * (1.0 - u) * (u - CUBIC_A)


def cubic_reaction_prime(u):
    return -3.0 * u ** 2 + 2.0 * (1.0 + CUBIC_A) * u - CUBIC_A


def cubic_profile(x):
    return 1.0 / (1.0 + np.exp(np.clip(np.asarray(x, dtype=float) / np.sqrt(2.0),
                                       -500, 500)))


@pytest.fixture(scope="session")
def default_model():
    return DEFAULT_MODEL


@pytest.fixture(scope="session")
def anchors(default_model):
    """(bistable wave, ignition-floor wave) for the default family."""
    return wave_anchors(default_model)


@pytest.fixture(scope="session")
def solver_cfg(default_model):
    return pde.SolverConfig(dt=pde.default_dt(0.05, default_model.lip_const),
                            window_width=160.0,
                            max_lip=default_model.lip_const)


@pytest.fixture(scope="session")
def burned_ref(default_model, solver_cfg, anchors):
    """Converged reference wave: step data evolved for 40/c_B."""
    wb, _ = anchors
    ref, _ = burn_in(default_model, solver_cfg, wb.speed, 0.05, 160.0)
    return ref


@pytest.fixture(scope="session")
def converged_history(default_model, solver_cfg, burned_ref):
    """Snapshot record of 12 time units past burn-in, 0.5 apart."""
    history = pde.WaveHistory(every=50)
    fld = burned_ref.copy()
    pde.evolve(fld, default_model, solver_cfg, fld.time + 12.0,
               observers=(history,))
    return history


@pytest.fixture(scope="session")
def stability_report(default_model):
    spec = ExperimentSpec(model=default_model, kind="stability",
                          params=(("horizon", 120.0), ("amplitude", 0.02)))
    return run_stability(spec)


@pytest.fixture(scope="session")
def uniqueness_report(default_model, anchors):
    wb, _ = anchors
    spec = ExperimentSpec(model=default_model, kind="uniqueness",
                          params=(("horizon", 200.0 / wb.speed),))
    return run_uniqueness(spec)
