"""Distance between descent trajectories on empirical vs population risk.

The population trajectory on a finite-support distribution is exact (no
Monte-Carlo error), so per-step distances measure only the sampling error
of the empirical gradient path.  Two theoretical envelopes are evaluated:

* in expectation:   4*eta*L*(t+1)/sqrt(n) + 4*eta*L*sqrt(t+1)
* high probability: 6*eta*L*t*sqrt(log(T/delta))/sqrt(n) + 4*eta*L*sqrt(t)
  (per-step form after a union bound over the horizon T), plus the
  single-step variant 6*eta*L*(t+1)*sqrt(log(1/delta))/sqrt(n)
  + 4*eta*L*sqrt(t+1) without the union bound.

Replacing one sample point moves the whole trajectory by at most
O(eta*t/n + eta*sqrt(t)); the stability experiment contrasts that swap
distance with each trajectory's distance to the population path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._pool import parallel_map
from .distributions import FiniteDistribution, auxiliary_rng, sample
from .engine import (
    GdConfig,
    Trajectory,
    average_iterate,
    constrained_erm_oracle,
    gd_run_empirical,
    gd_run_empirical_lean,
    gd_run_population,
)
from .errors import ConfigurationError, DimensionMismatch
from .objectives import Objective


def trajectory_distance(a: Trajectory, b: Trajectory) -> np.ndarray:
    """Per-step Euclidean distances ||a_t - b_t||, length steps + 1."""
    if a.iterates.shape != b.iterates.shape:
        raise DimensionMismatch("trajectories have different shapes")
    return np.linalg.norm(a.iterates - b.iterates, axis=1)


def _validate_bound_args(eta: float, L: float, n: int, delta: float | None = None) -> None:
    if eta < 0 or L <= 0 or n < 1:
        raise ConfigurationError("need eta >= 0, L > 0, n >= 1")
    if delta is not None and not 0.0 < delta <= 1.0:
        raise ConfigurationError("delta must lie in (0, 1]")


def proximity_bound_expectation(eta: float, L: float, t, n: int):
    """Expected-distance envelope 4*eta*L*(t+1)/sqrt(n) + 4*eta*L*sqrt(t+1).

    Derived for the iterate reached after t+1 steps and increasing in t, so
    evaluating it at t also bounds the iterate after t steps (slightly
    loosely).  Vectorizes over t.
    """
    _validate_bound_args(eta, L, n)
    t = np.asarray(t, dtype=float)
    out = 4.0 * eta * L * (t + 1.0) / math.sqrt(n) + 4.0 * eta * L * np.sqrt(t + 1.0)
    return float(out) if out.ndim == 0 else out


def proximity_bound_highprob(eta: float, L: float, t, n: int, delta: float, total_steps: int | None = None):
    """Per-step high-probability envelope after a union bound over the horizon.

    6*eta*L*t*sqrt(log(T/delta))/sqrt(n) + 4*eta*L*sqrt(t) with T =
    ``total_steps`` (defaults to t itself).  With probability at least
    1 - delta, every step t in [1, T] stays below this curve.
    """
    _validate_bound_args(eta, L, n, delta)
    t = np.asarray(t, dtype=float)
    T = t if total_steps is None else float(total_steps)
    log_arg = np.maximum(T / delta, 1.0)
    out = np.where(
        t > 0,
        6.0 * eta * L * t * np.sqrt(np.log(log_arg)) / math.sqrt(n)
        + 4.0 * eta * L * np.sqrt(t),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def proximity_bound_highprob_single(eta: float, L: float, t, n: int, delta: float):
    """Single-step high-probability envelope (no union bound over steps).

    6*eta*L*(t+1)*sqrt(log(1/delta))/sqrt(n) + 4*eta*L*sqrt(t+1); at
    delta -> 1 the concentration term vanishes and the envelope is the
    drift-only 4*eta*L*sqrt(t+1).
    """
    _validate_bound_args(eta, L, n, delta)
    t = np.asarray(t, dtype=float)
    out = 6.0 * eta * L * (t + 1.0) * math.sqrt(math.log(1.0 / delta)) / math.sqrt(
        n
    ) + 4.0 * eta * L * np.sqrt(t + 1.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# replicated experiments
# ---------------------------------------------------------------------------

def _proximity_worker(payload):
    obj, dist, n, cfg, seed, r, ref = payload
    S = sample(dist, n, seed, r)
    run = gd_run_empirical_lean(obj, S, cfg, reference=ref)
    return run.reference_distances


@dataclass(frozen=True)
class ProximitySummary:
    """Per-step distance statistics over replicates, with both envelopes."""

    n: int
    replicates: int
    eta: float
    lipschitz: float
    delta: float
    distances: np.ndarray        # (replicates, steps + 1)
    mean: np.ndarray
    mean_stderr: np.ndarray
    q50: np.ndarray
    q90: np.ndarray
    max: np.ndarray
    bound_expectation: np.ndarray
    bound_highprob: np.ndarray
    exceeded: np.ndarray         # (replicates,) bool: ever above the hp envelope
    exceed_fraction: float

    @property
    def steps(self) -> int:
        return self.distances.shape[1] - 1


def proximity_experiment(
    obj: Objective,
    dist: FiniteDistribution,
    cfg: GdConfig,
    n: int,
    replicates: int,
    seed: int,
    delta: float,
    workers: int = 1,
) -> ProximitySummary:
    """Distance of replicated empirical trajectories to the exact population path."""
    if replicates < 1:
        raise ConfigurationError("need at least one replicate")
    pop = gd_run_population(obj, dist, cfg)
    ref = pop.iterates
    payloads = [(obj, dist, n, cfg, seed, r, ref) for r in range(replicates)]
    rows = parallel_map(_proximity_worker, payloads, workers)
    distances = np.vstack(rows)

    t = np.arange(cfg.steps + 1)
    L = obj.lipschitz
    bound_exp = proximity_bound_expectation(cfg.eta, L, t, n)
    bound_hp = proximity_bound_highprob(cfg.eta, L, t, n, delta, total_steps=cfg.steps)
    with np.errstate(invalid="ignore"):
        exceeded = np.any(distances[:, 1:] > bound_hp[1:], axis=1)

    mean = distances.mean(axis=0)
    stderr = distances.std(axis=0, ddof=1) / math.sqrt(replicates) if replicates > 1 else np.zeros_like(mean)
    return ProximitySummary(
        n=n,
        replicates=replicates,
        eta=cfg.eta,
        lipschitz=L,
        delta=delta,
        distances=distances,
        mean=mean,
        mean_stderr=stderr,
        q50=np.quantile(distances, 0.5, axis=0),
        q90=np.quantile(distances, 0.9, axis=0),
        max=distances.max(axis=0),
        bound_expectation=bound_exp,
        bound_highprob=bound_hp,
        exceeded=exceeded,
        exceed_fraction=float(exceeded.mean()),
    )


def bassily_reference(eta: float, L: float, t, n: int):
    """Reference swap-stability curve 4*eta*L*(t/n + sqrt(t)); plotted, not asserted."""
    _validate_bound_args(eta, L, n)
    t = np.asarray(t, dtype=float)
    out = 4.0 * eta * L * (t / n + np.sqrt(t))
    return float(out) if out.ndim == 0 else out


def _stability_worker(payload):
    obj, dist, n, cfg, seed, r, ref = payload
    S = sample(dist, n, seed, r)
    rng = auxiliary_rng(seed, r)
    i = int(rng.integers(0, n))
    j = int(rng.choice(dist.support_size, p=dist.probs))
    swapped = S.instances.copy()
    swapped[i] = dist.atoms[j]
    traj = gd_run_empirical(obj, S, cfg)
    traj_swapped = gd_run_empirical(obj, swapped, cfg)
    swap_dist = np.linalg.norm(traj.iterates - traj_swapped.iterates, axis=1)
    to_pop = np.linalg.norm(traj.iterates - ref, axis=1)
    to_pop_swapped = np.linalg.norm(traj_swapped.iterates - ref, axis=1)
    return swap_dist, to_pop, to_pop_swapped


@dataclass(frozen=True)
class StabilitySummary:
    """One-point-swap trajectory sensitivity vs distance to the population path."""

    n: int
    replicates: int
    eta: float
    lipschitz: float
    swap_distance_mean: np.ndarray
    swap_distance_max: np.ndarray
    to_population_mean: np.ndarray
    to_population_swapped_mean: np.ndarray
    bassily_reference: np.ndarray


def stability_experiment(
    obj: Objective,
    dist: FiniteDistribution,
    cfg: GdConfig,
    n: int,
    replicates: int,
    seed: int,
    workers: int = 1,
) -> StabilitySummary:
    """Swap one sample point per replicate; track both trajectories."""
    if replicates < 1:
        raise ConfigurationError("need at least one replicate")
    pop = gd_run_population(obj, dist, cfg)
    payloads = [(obj, dist, n, cfg, seed, r, pop.iterates) for r in range(replicates)]
    rows = parallel_map(_stability_worker, payloads, workers)
    swap = np.vstack([r[0] for r in rows])
    to_pop = np.vstack([r[1] for r in rows])
    to_pop_swapped = np.vstack([r[2] for r in rows])
    t = np.arange(cfg.steps + 1)
    return StabilitySummary(
        n=n,
        replicates=replicates,
        eta=cfg.eta,
        lipschitz=obj.lipschitz,
        swap_distance_mean=swap.mean(axis=0),
        swap_distance_max=swap.max(axis=0),
        to_population_mean=to_pop.mean(axis=0),
        to_population_swapped_mean=to_pop_swapped.mean(axis=0),
        bassily_reference=bassily_reference(cfg.eta, obj.lipschitz, t, n),
    )


def _centered_worker(payload):
    obj, dist, n, cfg, seed, r, wbar_pop, radius, oracle_budget = payload
    S = sample(dist, n, seed, r)
    traj = gd_run_empirical(obj, S, cfg)
    wbar = average_iterate(traj)
    prox = float(np.linalg.norm(wbar - wbar_pop)) * obj.lipschitz / math.sqrt(n)
    erm_gap = None
    if radius is not None:
        emp = float(np.mean(obj.values(wbar, S.instances)))
        oracle = constrained_erm_oracle(obj, S, radius, budget=oracle_budget)
        erm_gap = emp - oracle.value
    return prox, erm_gap


@dataclass(frozen=True)
class CenteredTerms:
    """Average-iterate report terms centered at the population average iterate.

    proximity_term averages ||wbar_S - wbar_D|| * L / sqrt(n); erm_gap
    averages F_S(wbar_S) minus the oracle ball minimum (oracle tolerance
    attached).  Computed on the same replicate stream as the other
    experiments.
    """

    n: int
    replicates: int
    proximity_term: float
    proximity_stderr: float
    erm_gap: float | None
    erm_gap_stderr: float | None
    oracle_tolerance: float | None


def centered_terms(
    obj: Objective,
    dist: FiniteDistribution,
    cfg: GdConfig,
    n: int,
    replicates: int,
    seed: int,
    radius: float | None = 1.0,
    oracle_budget: int = 10_000,
    workers: int = 1,
) -> CenteredTerms:
    """Monte-Carlo estimate of the trajectory-centered report terms."""
    if replicates < 2:
        raise ConfigurationError("need at least two replicates for a stderr")
    pop = gd_run_population(obj, dist, cfg)
    wbar_pop = average_iterate(pop)
    payloads = [
        (obj, dist, n, cfg, seed, r, wbar_pop, radius, oracle_budget)
        for r in range(replicates)
    ]
    rows = parallel_map(_centered_worker, payloads, workers)
    prox = np.array([r[0] for r in rows])
    result = {
        "n": n,
        "replicates": replicates,
        "proximity_term": float(prox.mean()),
        "proximity_stderr": float(prox.std(ddof=1) / math.sqrt(replicates)),
        "erm_gap": None,
        "erm_gap_stderr": None,
        "oracle_tolerance": None,
    }
    if radius is not None:
        gaps = np.array([r[1] for r in rows])
        result["erm_gap"] = float(gaps.mean())
        result["erm_gap_stderr"] = float(gaps.std(ddof=1) / math.sqrt(replicates))
        result["oracle_tolerance"] = 2.0 * obj.lipschitz * radius / math.sqrt(oracle_budget)
    return CenteredTerms(**result)
