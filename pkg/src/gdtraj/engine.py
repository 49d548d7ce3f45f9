"""Unprojected (sub)gradient descent on empirical and population risk.

The update is w_{t+1} = w_t - eta * g_t with g_t the (probability-weighted)
mean subgradient of the per-instance objective, started at w_0 = 0 unless
configured otherwise.  Iterate t therefore denotes the weight vector after
t update steps, and every consecutive step moves by at most eta * L.

A projected variant with decaying steps serves as the constrained-minimizer
oracle used by report gates; it never feeds back into the descent under test.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .distributions import FiniteDistribution, SampleSet
from .errors import ConfigurationError, DimensionMismatch, NumericFault
from .objectives import Objective

AVERAGING_SCHEMES = ("full", "tail", "last")


@dataclass(frozen=True)
class GdConfig:
    """Step size, horizon and averaging scheme for one descent run.

    ``steps`` may be 0 (the trajectory is then just [w0]); averaging
    requires at least one step.  ``tail_fraction`` applies to the "tail"
    scheme only and averages the last ceil(fraction * steps) iterates.
    """

    eta: float
    steps: int
    averaging: str = "full"
    tail_fraction: float = 0.5
    w0: np.ndarray | None = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ConfigurationError("step size eta must be > 0")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ConfigurationError("steps must be a nonnegative integer")
        if self.averaging not in AVERAGING_SCHEMES:
            raise ConfigurationError(f"unknown averaging scheme {self.averaging!r}")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise ConfigurationError("tail_fraction must lie in (0, 1]")
        if self.w0 is not None:
            w0 = np.asarray(self.w0, dtype=float)
            w0.flags.writeable = False
            object.__setattr__(self, "w0", w0)


@dataclass(frozen=True)
class Trajectory:
    """All iterates of one run: shape (steps + 1, dim), row t = iterate t."""

    iterates: np.ndarray
    config: GdConfig
    source: str

    def __post_init__(self):
        it = np.asarray(self.iterates, dtype=float)
        it.flags.writeable = False
        object.__setattr__(self, "iterates", it)

    @property
    def steps(self) -> int:
        return self.iterates.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.iterates.shape[1]

    def step_norms(self) -> np.ndarray:
        """Norms of the T displacements w_{t+1} - w_t (the step-size invariant)."""
        return np.linalg.norm(np.diff(self.iterates, axis=0), axis=1)

    def iterate_norms(self) -> np.ndarray:
        """Norms of the T + 1 iterates w_0 .. w_T."""
        return np.linalg.norm(self.iterates, axis=1)


@dataclass(frozen=True)
class LeanRun:
    """Memory-lean run record: running averages instead of full iterates.

    Used for horizons where storing (steps+1, dim) is wasteful.  Carries
    the full-average iterate, the final iterate, the maximum step norm and,
    when a reference trajectory was supplied, per-step distances to it.
    """

    average: np.ndarray
    last: np.ndarray
    max_step_norm: float
    config: GdConfig
    source: str
    reference_distances: np.ndarray | None = None


def _resolve_batch(obj: Objective, data) -> tuple[np.ndarray, np.ndarray | None, str]:
    if isinstance(data, SampleSet):
        return data.instances, None, f"empirical(seed={data.seed},replicate={data.replicate},n={data.n})"
    if isinstance(data, FiniteDistribution):
        return data.atoms, data.probs, f"population(atoms={data.support_size})"
    Z = np.asarray(data, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    return Z, None, f"empirical(n={Z.shape[0]})"


def _start_point(obj: Objective, cfg: GdConfig) -> np.ndarray:
    if cfg.w0 is None:
        return np.zeros(obj.dim)
    w0 = np.asarray(cfg.w0, dtype=float)
    if w0.shape != (obj.dim,):
        raise DimensionMismatch("w0 shape does not match objective dim")
    return w0.copy()


def _descend(obj: Objective, data, cfg: GdConfig, record: bool, reference=None):
    Z, weights, source = _resolve_batch(obj, data)
    if Z.shape[1] != obj.instance_dim:
        raise DimensionMismatch("instance rows do not match objective instance_dim")
    w = _start_point(obj, cfg)
    T = int(cfg.steps)
    ref = None
    if reference is not None:
        ref = np.asarray(reference.iterates if isinstance(reference, Trajectory) else reference, dtype=float)
        if ref.shape != (T + 1, obj.dim):
            raise DimensionMismatch("reference trajectory shape does not match run")

    if record:
        iterates = np.empty((T + 1, obj.dim))
        iterates[0] = w
        for t in range(T):
            g = obj.mean_subgrad(w, Z, weights)
            w = w - cfg.eta * g
            if not np.all(np.isfinite(w)):
                raise NumericFault("non-finite iterate", step=t + 1)
            iterates[t + 1] = w
        traj = Trajectory(iterates=iterates, config=cfg, source=source)
        _check_step_sizes(traj.step_norms(), cfg.eta, obj.lipschitz)
        return traj

    running = np.zeros(obj.dim)
    max_step = 0.0
    dists = None if ref is None else np.empty(T + 1)
    if dists is not None:
        dists[0] = float(np.linalg.norm(w - ref[0]))
    for t in range(T):
        g = obj.mean_subgrad(w, Z, weights)
        step = cfg.eta * g
        w = w - step
        if not np.all(np.isfinite(w)):
            raise NumericFault("non-finite iterate", step=t + 1)
        running += w
        max_step = max(max_step, float(np.linalg.norm(step)))
        if dists is not None:
            dists[t + 1] = float(np.linalg.norm(w - ref[t + 1]))
    _check_step_sizes(np.array([max_step]), cfg.eta, obj.lipschitz)
    average = running / T if T > 0 else w.copy()
    return LeanRun(
        average=average,
        last=w,
        max_step_norm=max_step,
        config=cfg,
        source=source,
        reference_distances=dists,
    )


def _check_step_sizes(step_norms: np.ndarray, eta: float, L: float) -> None:
    if step_norms.size and float(step_norms.max()) > eta * L * (1.0 + 1e-9) + 1e-15:
        raise NumericFault(
            f"step norm {float(step_norms.max()):.6g} exceeds eta*L = {eta * L:.6g}; "
            "the objective's declared Lipschitz constant is wrong"
        )


def gd_run_empirical(obj: Objective, data, cfg: GdConfig, record: bool = True):
    """Descend on the empirical risk of a SampleSet (or raw instance rows)."""
    if isinstance(data, FiniteDistribution):
        raise ConfigurationError("got a distribution; use gd_run_population")
    return _descend(obj, data, cfg, record)


def gd_run_population(obj: Objective, dist: FiniteDistribution, cfg: GdConfig, record: bool = True):
    """Descend on the exact population risk of a finite-support distribution."""
    return _descend(obj, dist, cfg, record)


def gd_run_population_lean(obj, dist, cfg, reference=None):
    return _descend(obj, dist, cfg, record=False, reference=reference)


def gd_run_empirical_lean(obj, data, cfg, reference=None):
    return _descend(obj, data, cfg, record=False, reference=reference)


def average_iterate(traj: Trajectory) -> np.ndarray:
    """The configured average of iterates 1..T (w_0 never enters).

    full: mean of w_1..w_T; tail: mean of the last ceil(fraction*T) of
    those; last: w_T.
    """
    if traj.steps < 1:
        raise ConfigurationError("averaging requires at least one step")
    body = traj.iterates[1:]
    scheme = traj.config.averaging
    if scheme == "full":
        return body.mean(axis=0)
    if scheme == "tail":
        k = int(np.ceil(traj.config.tail_fraction * traj.steps))
        return body[-k:].mean(axis=0)
    return body[-1].copy()


def trajectory_to_csv(traj: Trajectory, path, max_coords: int | None = None) -> None:
    """Write t, leading coordinates, and the iterate norm, one row per t."""
    d = traj.dim if max_coords is None else min(traj.dim, int(max_coords))
    norms = np.linalg.norm(traj.iterates, axis=1)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"w{i}" for i in range(d)] + ["norm"])
        for t in range(traj.steps + 1):
            row = [t] + [repr(float(v)) for v in traj.iterates[t, :d]]
            row.append(repr(float(norms[t])))
            writer.writerow(row)


@dataclass(frozen=True)
class OracleResult:
    """Constrained-minimizer estimate with its additive value tolerance."""

    w: np.ndarray
    value: float
    tolerance: float


def constrained_erm_oracle(
    obj: Objective,
    data,
    radius: float,
    budget: int = 100_000,
    weights: np.ndarray | None = None,
) -> OracleResult:
    """Approximate min of the (weighted) empirical risk over a radius-B ball.

    Projected subgradient descent from 0 with steps B/(L*sqrt(k)); the
    returned value is the best of the full-average, last-half-average and
    final iterates, and is within 2*L*B/sqrt(budget) of the true constrained
    minimum.  Pass ``weights`` to minimize an exactly weighted risk (e.g. a
    population risk over the atom set).
    """
    if not radius > 0:
        raise ConfigurationError("oracle radius must be > 0")
    if budget < 1:
        raise ConfigurationError("oracle budget must be >= 1")
    Z, w_auto, _ = _resolve_batch(obj, data)
    if weights is None:
        weights = w_auto
    L = obj.lipschitz
    B = float(radius)
    w = np.zeros(obj.dim)
    total = np.zeros(obj.dim)
    tail_start = budget // 2
    tail = np.zeros(obj.dim)
    for k in range(1, budget + 1):
        g = obj.mean_subgrad(w, Z, weights)
        w = w - (B / (L * np.sqrt(k))) * g
        nrm = float(np.linalg.norm(w))
        if nrm > B:
            w = w * (B / nrm)
        total += w
        if k > tail_start:
            tail += w

    def risk(v: np.ndarray) -> float:
        return float(obj.values(v, Z) @ (weights if weights is not None else np.full(Z.shape[0], 1.0 / Z.shape[0])))

    candidates = [total / budget, w]
    if budget - tail_start > 0:
        candidates.insert(1, tail / (budget - tail_start))
    values = [risk(v) for v in candidates]
    best = int(np.argmin(values))
    return OracleResult(
        w=candidates[best],
        value=values[best],
        tolerance=2.0 * L * B / np.sqrt(budget),
    )
