"""Named ready-made instances (objective + distribution + optional loss/clip).

Preset names describe the construction, not any external source:

* ``signed-drift``       one-dimensional linear loss over uniform +/-1 labels;
                         the trajectory drifts with the empirical mean.
* ``max-coord``          drift plus a max-coordinate hinge in d > T dimensions;
                         kink order is sample-dependent (needs n, eta, steps).
* ``origin-drift``       deterministic one-atom linear instance whose average
                         iterate trades empirical optimality against norm.
* ``origin-scaled-drift``same, with the drift slope shrunk to L/n^(1/4)
                         (needs n).
* ``hinge``              two-dimensional margin classification over four
                         atoms; the population minimum sits on the unit
                         sphere, so unit-ball excess risk is nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constructions import (
    MaxCoordParams,
    origin_ball_instance,
    signed_drift_instance,
)
from .distributions import FiniteDistribution
from .errors import ConfigurationError
from .generalization import ClipSpec
from .objectives import GlmObjective, Objective, ScalarLoss

PRESET_NAMES = (
    "signed-drift",
    "max-coord",
    "origin-drift",
    "origin-scaled-drift",
    "hinge",
)

#: presets whose construction depends on the sample size
N_DEPENDENT = ("max-coord", "origin-scaled-drift")


@dataclass(frozen=True)
class Preset:
    name: str
    objective: Objective
    distribution: FiniteDistribution
    loss: ScalarLoss | None = None
    clip: ClipSpec | None = None
    maxcoord: MaxCoordParams | None = None


def hinge_instance() -> tuple[GlmObjective, FiniteDistribution, ScalarLoss, ClipSpec]:
    """Four-atom margin problem in two dimensions.

    Features are the unit vectors u = (0.6, 0.8) and v = (-0.8, 0.6); labels
    on u are +1 with probability 0.85, labels on v are a fair coin.  The
    population hinge risk over the unit ball is minimized at w = u exactly
    (value 0.65): the v-coordinate is pure noise, so any mass spent on it is
    wasted, and the u-margin is best pushed to the boundary.
    """
    loss = ScalarLoss("hinge", lipschitz=1.0)
    u = np.array([0.6, 0.8])
    v = np.array([-0.8, 0.6])
    atoms = np.array(
        [
            [u[0], u[1], 1.0],
            [u[0], u[1], -1.0],
            [v[0], v[1], 1.0],
            [v[0], v[1], -1.0],
        ]
    )
    probs = np.array([0.425, 0.075, 0.25, 0.25])
    dist = FiniteDistribution(atoms, probs)
    return GlmObjective(loss, dim=2), dist, loss, ClipSpec(b=1.0, c=2.0)


def make_preset(
    name: str,
    *,
    lipschitz: float = 1.0,
    n: int | None = None,
    eta: float | None = None,
    steps: int | None = None,
    dim: int | None = None,
) -> Preset:
    """Build a preset by name; n-dependent presets require their parameters."""
    if name == "signed-drift":
        obj, dist = signed_drift_instance(lipschitz=lipschitz, dim=1)
        return Preset(name, obj, dist)
    if name == "max-coord":
        if n is None or eta is None or steps is None:
            raise ConfigurationError("max-coord preset needs n, eta, and steps")
        params = MaxCoordParams(
            lipschitz=lipschitz,
            eta=eta,
            steps=steps,
            n=n,
            d=dim if dim is not None else 2 * steps,
        )
        return Preset(name, params.objective(), params.distribution(), maxcoord=params)
    if name == "origin-drift":
        obj, dist = origin_ball_instance("drift", lipschitz=lipschitz, n=n or 1)
        return Preset(name, obj, dist)
    if name == "origin-scaled-drift":
        if n is None:
            raise ConfigurationError("origin-scaled-drift preset needs n")
        obj, dist = origin_ball_instance("scaled-drift", lipschitz=lipschitz, n=n)
        return Preset(name, obj, dist)
    if name == "hinge":
        obj, dist, loss, spec = hinge_instance()
        return Preset(name, obj, dist, loss=loss, clip=spec)
    raise ConfigurationError(
        f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}"
    )
