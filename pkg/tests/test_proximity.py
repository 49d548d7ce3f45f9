"""Trajectory proximity: envelopes, replicated experiments, swap stability."""

import math

import numpy as np
import pytest

from gdtraj import (
    ConfigurationError,
    DimensionMismatch,
    GdConfig,
    auxiliary_rng,
    bassily_reference,
    centered_terms,
    gd_run_empirical,
    gd_run_population,
    make_preset,
    proximity_bound_expectation,
    proximity_bound_highprob,
    proximity_bound_highprob_single,
    proximity_experiment,
    sample,
    signed_drift_instance,
    stability_experiment,
    trajectory_distance,
)


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

def test_bound_expectation_reference_point():
    # eta 0.1, L 1, t 9, n 100: 4*0.1*10/10 + 4*0.1*sqrt(10)
    value = proximity_bound_expectation(0.1, 1.0, 9, 100)
    assert value == pytest.approx(0.4 + 0.4 * math.sqrt(10.0))
    assert value == pytest.approx(1.6649, abs=1e-4)


def test_bound_highprob_reference_point():
    value = proximity_bound_highprob(0.1, 1.0, 100, 100, 0.01, total_steps=100)
    expect = 6.0 * math.sqrt(math.log(10_000.0)) + 4.0
    assert value == pytest.approx(expect)
    assert value == pytest.approx(22.21, abs=5e-3)


def test_bound_highprob_single_drift_only_limit():
    # at delta = 1 the concentration term drops; t = 0 leaves one step of drift
    assert proximity_bound_highprob_single(0.1, 1.0, 0, 100, 1.0) == pytest.approx(0.4)


def test_bounds_vanish_with_stepsize():
    t = np.arange(10)
    assert np.all(proximity_bound_expectation(0.0, 1.0, t, 50) == 0.0)
    assert np.all(proximity_bound_highprob(0.0, 1.0, t, 50, 0.1) == 0.0)


def test_bound_highprob_zero_at_start():
    assert proximity_bound_highprob(0.1, 1.0, 0, 100, 0.05, total_steps=10) == 0.0


def test_bounds_decrease_with_sample_size():
    lo = proximity_bound_expectation(0.1, 1.0, 20, 400)
    hi = proximity_bound_expectation(0.1, 1.0, 20, 100)
    assert lo < hi


def test_bounds_vectorize_over_t():
    t = np.array([0, 4, 9])
    out = proximity_bound_expectation(0.1, 1.0, t, 100)
    assert out.shape == (3,)
    assert out[2] == pytest.approx(1.6649, abs=1e-4)


def test_bound_argument_validation():
    with pytest.raises(ConfigurationError):
        proximity_bound_expectation(-0.1, 1.0, 5, 10)
    with pytest.raises(ConfigurationError):
        proximity_bound_expectation(0.1, 1.0, 5, 0)
    with pytest.raises(ConfigurationError):
        proximity_bound_highprob(0.1, 1.0, 5, 10, 0.0)
    with pytest.raises(ConfigurationError):
        proximity_bound_highprob(0.1, 1.0, 5, 10, 1.5)


def test_trajectory_distance_basics():
    obj, dist = signed_drift_instance()
    cfg = GdConfig(eta=0.1, steps=5)
    S = sample(dist, 12, seed=3)
    emp = gd_run_empirical(obj, S, cfg)
    pop = gd_run_population(obj, dist, cfg)
    d = trajectory_distance(emp, pop)
    assert d.shape == (6,)
    assert d[0] == 0.0
    assert np.all(trajectory_distance(emp, emp) == 0.0)
    short = gd_run_empirical(obj, S, GdConfig(eta=0.1, steps=3))
    with pytest.raises(DimensionMismatch):
        trajectory_distance(emp, short)


# ---------------------------------------------------------------------------
# replicated proximity experiment
# ---------------------------------------------------------------------------

def _binomial_mean_abs(n: int) -> float:
    """Exact E|mean of n independent signs| via the binomial pmf."""
    return sum(
        math.comb(n, k) * 0.5**n * abs(2.0 * k / n - 1.0) for k in range(n + 1)
    )


def test_proximity_experiment_single_atom_is_exact():
    preset = make_preset("origin-drift", n=50)
    summary = proximity_experiment(
        preset.objective, preset.distribution, GdConfig(eta=0.1, steps=10),
        n=50, replicates=20, seed=7, delta=0.05,
    )
    assert np.all(summary.distances == 0.0)
    assert summary.exceed_fraction == 0.0


def test_proximity_experiment_drift_linear_in_t():
    # population path stays at the origin, so per-replicate distance is
    # eta*L*t*|sample mean|: exactly linear in t
    obj, dist = signed_drift_instance()
    summary = proximity_experiment(
        obj, dist, GdConfig(eta=0.2, steps=8), n=16, replicates=50, seed=11, delta=0.1,
    )
    t = np.arange(9)
    slopes = summary.distances[:, 1]
    assert np.allclose(summary.distances, np.outer(slopes, t), atol=1e-12)


def test_proximity_experiment_drift_mean_matches_binomial():
    n, eta, T, R = 8, 0.1, 6, 600
    obj, dist = signed_drift_instance()
    summary = proximity_experiment(
        obj, dist, GdConfig(eta=eta, steps=T), n=n, replicates=R, seed=13, delta=0.1,
    )
    expect = eta * T * _binomial_mean_abs(n)
    assert abs(summary.mean[T] - expect) <= 5.0 * summary.mean_stderr[T]


def test_proximity_experiment_hinge_within_envelopes():
    preset = make_preset("hinge")
    n, T = 64, 64
    cfg = GdConfig(eta=1.0 / math.sqrt(T), steps=T)
    summary = proximity_experiment(
        preset.objective, preset.distribution, cfg,
        n=n, replicates=200, seed=17, delta=0.05,
    )
    slack = 2.0 * summary.mean_stderr
    assert np.all(summary.mean <= summary.bound_expectation + slack)
    binom = 2.0 * math.sqrt(0.05 * 0.95 / 200)
    assert summary.exceed_fraction <= 0.05 + binom


def test_proximity_experiment_deterministic_and_worker_invariant():
    preset = make_preset("hinge")
    cfg = GdConfig(eta=0.2, steps=10)
    kw = dict(n=20, replicates=12, seed=23, delta=0.1)
    a = proximity_experiment(preset.objective, preset.distribution, cfg, **kw)
    b = proximity_experiment(preset.objective, preset.distribution, cfg, **kw)
    c = proximity_experiment(preset.objective, preset.distribution, cfg, workers=3, **kw)
    assert np.array_equal(a.distances, b.distances)
    assert np.array_equal(a.distances, c.distances)


def test_proximity_experiment_validates_replicates():
    obj, dist = signed_drift_instance()
    with pytest.raises(ConfigurationError):
        proximity_experiment(obj, dist, GdConfig(eta=0.1, steps=2), 4, 0, 1, 0.1)


# ---------------------------------------------------------------------------
# swap stability
# ---------------------------------------------------------------------------

def test_stability_single_atom_never_moves():
    preset = make_preset("origin-drift", n=30)
    summary = stability_experiment(
        preset.objective, preset.distribution, GdConfig(eta=0.1, steps=8),
        n=30, replicates=10, seed=29,
    )
    assert np.all(summary.swap_distance_max == 0.0)


def test_stability_drift_replay_closed_form():
    # replaying the auxiliary stream reproduces every swap exactly:
    # the trajectories differ by eta*L*t*|z_i - z_j'|/n
    n, eta, T, R, seed = 10, 0.3, 7, 40, 31
    obj, dist = signed_drift_instance()
    summary = stability_experiment(
        obj, dist, GdConfig(eta=eta, steps=T), n=n, replicates=R, seed=seed,
    )
    t = np.arange(T + 1)
    predicted = np.zeros((R, T + 1))
    for r in range(R):
        S = sample(dist, n, seed, r)
        rng = auxiliary_rng(seed, r)
        i = int(rng.integers(0, n))
        j = int(rng.choice(dist.support_size, p=dist.probs))
        shift = abs(float(S.instances[i, 0]) - float(dist.atoms[j, 0])) / n
        predicted[r] = eta * obj.lipschitz * t * shift
    assert np.allclose(summary.swap_distance_mean, predicted.mean(axis=0), atol=1e-12)
    assert np.allclose(summary.swap_distance_max, predicted.max(axis=0), atol=1e-12)


def test_stability_much_smaller_than_population_distance():
    # swapping one of n points moves the path by O(t/n); the distance to the
    # population path grows like t/sqrt(n), so at matched horizons the swap
    # effect is asymptotically negligible
    n, T = 64, 64
    obj, dist = signed_drift_instance()
    cfg = GdConfig(eta=1.0 / math.sqrt(T), steps=T)
    summary = stability_experiment(obj, dist, cfg, n=n, replicates=60, seed=37)
    assert summary.to_population_mean[T] >= 2.0 * summary.swap_distance_mean[T]
    assert np.all(summary.swap_distance_max <= bassily_reference(cfg.eta, 1.0, np.arange(T + 1), n) + 1e-12)


# ---------------------------------------------------------------------------
# centered report terms
# ---------------------------------------------------------------------------

def test_centered_terms_single_atom():
    preset = make_preset("origin-drift", n=40)
    out = centered_terms(
        preset.objective, preset.distribution, GdConfig(eta=0.05, steps=10),
        n=40, replicates=4, seed=41, radius=None,
    )
    assert out.proximity_term <= 1e-12
    assert out.erm_gap is None


def test_centered_terms_requires_two_replicates():
    preset = make_preset("hinge")
    with pytest.raises(ConfigurationError):
        centered_terms(
            preset.objective, preset.distribution, GdConfig(eta=0.1, steps=4),
            n=8, replicates=1, seed=1,
        )


def test_centered_terms_hinge_erm_gap_within_guarantee():
    preset = make_preset("hinge")
    n, T, B = 32, 32, 1.0
    eta = B / math.sqrt(T)
    out = centered_terms(
        preset.objective, preset.distribution, GdConfig(eta=eta, steps=T),
        n=n, replicates=8, seed=43, radius=B, oracle_budget=20_000,
    )
    guarantee = eta * 1.0 + B**2 / (eta * T) + out.oracle_tolerance
    assert out.erm_gap <= guarantee + 3.0 * out.erm_gap_stderr
    assert out.proximity_term <= proximity_bound_expectation(eta, 1.0, T, n) / math.sqrt(n) + 0.1


def test_centered_terms_deterministic_and_worker_invariant():
    preset = make_preset("hinge")
    cfg = GdConfig(eta=0.2, steps=8)
    kw = dict(n=16, replicates=6, seed=47, radius=1.0, oracle_budget=2_000)
    a = centered_terms(preset.objective, preset.distribution, cfg, **kw)
    b = centered_terms(preset.objective, preset.distribution, cfg, workers=2, **kw)
    assert a == b
