"""Convex Lipschitz losses and per-instance objectives.

Scalar losses compose with a bounded feature map into generalized-linear
objectives f(w; (x, y)) = loss(w . phi(x), y).  Two piecewise-linear
non-GLM objectives used by the worst-case experiments live here as well:
a one-coordinate signed drift and a drift-plus-max-coordinate objective.

Instance encoding is a flat float row per data point so that samples are
plain (m, instance_dim) arrays:

* GLM instances pack [phi(x)..., y] (instance_dim = dim + 1),
* scalar-instance objectives pack [z] (instance_dim = 1).

Subgradient conventions at kinks (all returned subgradients are valid
elements of the subdifferential):

* hinge returns 0 at the margin y*a = 1,
* absolute returns 0 at a = y,
* the max-coordinate term returns 0 whenever max_i(w_i - eps_i) <= 0 and
  otherwise uses the smallest-index maximizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionMismatch

LOSS_KINDS = ("hinge", "linear", "scaled-linear", "absolute")


@dataclass(frozen=True)
class ScalarLoss:
    """Convex scalar loss a -> value(a, y), Lipschitz in a.

    Kinds (L = ``lipschitz``):

    ==============  =======================================
    hinge           max(0, 1 - y*a)
    linear          L * a * y
    scaled-linear   L * scale * a * y    (0 < scale <= 1)
    absolute        L * |a - y|
    ==============  =======================================

    ``clip_margin`` / ``value_bound`` are the optional (b, c) pair declaring
    |value(a, y)| <= c on [-b, b] together with monotonicity beyond |y|;
    they parameterize clipped-risk experiments and are checked by the test
    suite rather than enforced per call.
    """

    kind: str
    lipschitz: float = 1.0
    scale: float = 1.0
    clip_margin: float | None = None
    value_bound: float | None = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ConfigurationError(f"unknown loss kind {self.kind!r}")
        if not self.lipschitz > 0:
            raise ConfigurationError("loss lipschitz constant must be > 0")
        if not 0.0 < self.scale <= 1.0:
            raise ConfigurationError("scaled-linear scale must lie in (0, 1]")

    def value(self, a, y):
        """Loss value; broadcasts over array-valued a, y."""
        a = np.asarray(a, dtype=float)
        y = np.asarray(y, dtype=float)
        L = self.lipschitz
        if self.kind == "hinge":
            return np.maximum(0.0, 1.0 - y * a)
        if self.kind == "linear":
            return L * a * y
        if self.kind == "scaled-linear":
            return L * self.scale * a * y
        return L * np.abs(a - y)

    def subgrad(self, a, y):
        """A subgradient of value(., y) at a; broadcasts like value()."""
        a = np.asarray(a, dtype=float)
        y = np.asarray(y, dtype=float)
        L = self.lipschitz
        if self.kind == "hinge":
            return np.where(y * a < 1.0, -y, 0.0)
        if self.kind == "linear":
            return L * y * np.ones_like(a)
        if self.kind == "scaled-linear":
            return L * self.scale * y * np.ones_like(a)
        return L * np.sign(a - y)


def loss_value(loss: ScalarLoss, a, y):
    """Functional alias for ScalarLoss.value."""
    return loss.value(a, y)


def loss_subgrad(loss: ScalarLoss, a, y):
    """Functional alias for ScalarLoss.subgrad."""
    return loss.subgrad(a, y)


class Objective:
    """Per-instance convex objective f(w; z) with batch evaluation.

    Concrete objectives define ``dim`` (weight dimension), ``lipschitz``
    (a valid Lipschitz constant in w for every instance), ``instance_dim``
    (columns of one encoded instance row), ``values`` and ``mean_subgrad``.
    Anything implementing this surface can be driven by the engine, so
    custom objectives are supported without subclassing.
    """

    dim: int
    lipschitz: float
    instance_dim: int
    form: str = "custom"

    def values(self, w: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """f(w; z) for every row z of Z; returns shape (m,)."""
        raise NotImplementedError

    def mean_subgrad(
        self, w: np.ndarray, Z: np.ndarray, weights: np.ndarray | None = None
    ) -> np.ndarray:
        """(Weighted) mean over rows of one subgradient per instance."""
        raise NotImplementedError

    # -- scalar conveniences -------------------------------------------------

    def value(self, w: np.ndarray, z) -> float:
        return float(self.values(w, _as_rows(z, self.instance_dim))[0])

    def subgrad(self, w: np.ndarray, z) -> np.ndarray:
        return self.mean_subgrad(w, _as_rows(z, self.instance_dim))

    def _check_w(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.dim,):
            raise DimensionMismatch(
                f"weight shape {w.shape} does not match objective dim {self.dim}"
            )
        return w


def _as_rows(z, instance_dim: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.ndim == 1:
        z = z.reshape(1, -1)
    if z.shape[1] != instance_dim:
        raise DimensionMismatch(
            f"instance row has {z.shape[1]} columns, expected {instance_dim}"
        )
    return z


def _norm_weights(m: int, weights: np.ndarray | None) -> np.ndarray:
    if weights is None:
        return np.full(m, 1.0 / m)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (m,):
        raise DimensionMismatch("weights length does not match instance count")
    return weights


class GlmObjective(Objective):
    """f(w; (x, y)) = loss(w . phi(x), y) with ||phi(x)|| <= 1.

    Instance rows are [phi(x)_1..phi(x)_d, y].
    """

    form = "glm"

    def __init__(self, loss: ScalarLoss, dim: int):
        if dim < 1:
            raise ConfigurationError("glm objective needs dim >= 1")
        self.loss = loss
        self.dim = int(dim)
        self.instance_dim = self.dim + 1
        self.lipschitz = loss.lipschitz

    def split(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(features, labels) view of encoded instance rows."""
        Z = _as_rows(Z, self.instance_dim)
        return Z[:, : self.dim], Z[:, self.dim]

    def values(self, w, Z):
        w = self._check_w(w)
        X, y = self.split(Z)
        return self.loss.value(X @ w, y)

    def mean_subgrad(self, w, Z, weights=None):
        w = self._check_w(w)
        X, y = self.split(Z)
        coef = self.loss.subgrad(X @ w, y)
        p = _norm_weights(X.shape[0], weights)
        return X.T @ (coef * p)


def glm_instance(features, label: float) -> np.ndarray:
    """Encode one (phi(x), y) pair as a flat instance row.

    Features must have Euclidean norm at most 1 (the unit-feature
    normalization every bound in this package assumes).
    """
    features = np.asarray(features, dtype=float).ravel()
    norm = float(np.linalg.norm(features))
    if norm > 1.0 + 1e-12:
        raise ConfigurationError(
            f"feature norm {norm:.6f} exceeds 1; rescale the features"
        )
    return np.concatenate([features, [float(label)]])


class LinearObjective(Objective):
    """One-coordinate signed drift f(w; z) = L * w[0] * z.

    Instances are scalars z (rows [z]); in dim > 1 the remaining
    coordinates are inert (zero-padding embedding).
    """

    form = "linear-construction"

    def __init__(self, lipschitz: float = 1.0, dim: int = 1):
        if not lipschitz > 0:
            raise ConfigurationError("lipschitz constant must be > 0")
        if dim < 1:
            raise ConfigurationError("dim must be >= 1")
        self.lipschitz = float(lipschitz)
        self.dim = int(dim)
        self.instance_dim = 1

    def values(self, w, Z):
        w = self._check_w(w)
        z = _as_rows(Z, 1)[:, 0]
        return self.lipschitz * w[0] * z

    def mean_subgrad(self, w, Z, weights=None):
        self._check_w(w)
        z = _as_rows(Z, 1)[:, 0]
        p = _norm_weights(z.shape[0], weights)
        g = np.zeros(self.dim)
        g[0] = self.lipschitz * float(z @ p)
        return g


class MaxCoordObjective(Objective):
    """Signed uniform drift plus a max-coordinate hinge.

    f(w; z) = -(gamma * L / 2) * z * sum(w)
              + (L / 2) * max(0, max_i(w_i - eps_i))

    with strictly increasing offsets eps and a drift strength gamma small
    enough that the overall objective stays L-Lipschitz
    ((gamma * L / 2) * sqrt(d) + L / 2 <= L).  Instances are scalars
    z in {0, 1}.  The max term's subgradient is 0 when the max is <= 0 and
    (L/2) e_j with the smallest-index maximizer j otherwise.
    """

    form = "nonsmooth-construction"

    def __init__(self, lipschitz: float, gamma: float, epsilons):
        eps = np.asarray(epsilons, dtype=float)
        if eps.ndim != 1 or eps.size < 1:
            raise ConfigurationError("epsilons must be a 1-d nonempty array")
        if not np.all(np.diff(eps) > 0) or not np.all(eps > 0):
            raise ConfigurationError("epsilons must be positive and strictly increasing")
        if not lipschitz > 0 or not gamma > 0:
            raise ConfigurationError("lipschitz and gamma must be > 0")
        if (gamma / 2.0) * np.sqrt(eps.size) + 0.5 > 1.0 + 1e-12:
            raise ConfigurationError(
                "gamma too large: objective would exceed the declared Lipschitz constant"
            )
        self.lipschitz = float(lipschitz)
        self.gamma = float(gamma)
        self.epsilons = eps
        self.epsilons.flags.writeable = False
        self.dim = int(eps.size)
        self.instance_dim = 1

    def _max_term(self, w: np.ndarray) -> tuple[float, int]:
        slack = w - self.epsilons
        j = int(np.argmax(slack))  # smallest index among maximizers
        return float(slack[j]), j

    def values(self, w, Z):
        w = self._check_w(w)
        z = _as_rows(Z, 1)[:, 0]
        top, _ = self._max_term(w)
        hinge = 0.5 * self.lipschitz * max(0.0, top)
        drift = -(self.gamma * self.lipschitz / 2.0) * float(np.sum(w))
        return drift * z + hinge

    def mean_subgrad(self, w, Z, weights=None):
        w = self._check_w(w)
        z = _as_rows(Z, 1)[:, 0]
        p = _norm_weights(z.shape[0], weights)
        g = np.full(self.dim, -(self.gamma * self.lipschitz / 2.0) * float(z @ p))
        top, j = self._max_term(w)
        if top > 0.0:
            g[j] += 0.5 * self.lipschitz
        return g
