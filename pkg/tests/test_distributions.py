"""Finite-support distributions: sampling determinism and exact population sums."""

import math

import numpy as np
import pytest

from gdtraj import (
    ConfigurationError,
    DimensionMismatch,
    FiniteDistribution,
    GlmObjective,
    LinearObjective,
    MaxCoordParams,
    ScalarLoss,
    empirical_risk,
    hinge_instance,
    mix64,
    population_risk,
    population_subgrad,
    sample,
    signed_drift_instance,
)


def rademacher_dist():
    return FiniteDistribution(np.array([[1.0], [-1.0]]), np.array([0.5, 0.5]))


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------

def test_probs_must_sum_to_one():
    with pytest.raises(ConfigurationError):
        FiniteDistribution(np.array([[1.0], [-1.0]]), np.array([0.6, 0.6]))


def test_probs_must_be_nonnegative():
    with pytest.raises(ConfigurationError):
        FiniteDistribution(np.array([[1.0], [-1.0]]), np.array([1.5, -0.5]))


def test_atoms_are_immutable():
    dist = rademacher_dist()
    with pytest.raises(ValueError):
        dist.atoms[0, 0] = 7.0


def test_mix64_rejects_negative():
    with pytest.raises(ConfigurationError):
        mix64(-1, 0)


def test_mix64_spreads_replicates():
    seeds = {mix64(7, r) for r in range(1000)}
    assert len(seeds) == 1000


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_single_atom_sample_is_constant():
    dist = FiniteDistribution(np.array([[2.0, 3.0]]), np.array([1.0]))
    S = sample(dist, 3, seed=0)
    assert S.instances.shape == (3, 2)
    assert np.all(S.instances == [2.0, 3.0])


def test_sample_deterministic():
    dist = rademacher_dist()
    a = sample(dist, 50, seed=123, replicate=4)
    b = sample(dist, 50, seed=123, replicate=4)
    assert np.array_equal(a.instances, b.instances)
    c = sample(dist, 50, seed=123, replicate=5)
    assert not np.array_equal(a.instances, c.instances)


def test_sample_mean_clt_band():
    # n = 1e5 draws of +/-1: mean within 0.02 of 0 (a > 4 sigma band)
    dist = rademacher_dist()
    S = sample(dist, 100_000, seed=7)
    assert abs(float(S.instances.mean())) < 0.02


def test_sample_frequencies_match_probs():
    dist = FiniteDistribution(
        np.array([[0.0], [1.0], [2.0]]), np.array([0.2, 0.3, 0.5])
    )
    S = sample(dist, 200_000, seed=11)
    values = S.instances[:, 0]
    for v, p in [(0.0, 0.2), (1.0, 0.3), (2.0, 0.5)]:
        freq = float(np.mean(values == v))
        # 5 sigma band on a Bernoulli(p) frequency
        assert abs(freq - p) < 5.0 * math.sqrt(p * (1 - p) / 200_000)


# ---------------------------------------------------------------------------
# population quantities
# ---------------------------------------------------------------------------

def test_population_risk_symmetric_drift_is_zero():
    obj, dist = signed_drift_instance(lipschitz=1.0)
    for w in (np.array([0.0]), np.array([3.0]), np.array([-2.5])):
        assert population_risk(dist, obj, w) == pytest.approx(0.0)
        assert np.allclose(population_subgrad(dist, obj, w), 0.0)


def test_population_risk_single_atom_equals_instance_value():
    obj = LinearObjective(lipschitz=2.0, dim=1)
    dist = FiniteDistribution(np.array([[1.0]]), np.array([1.0]))
    w = np.array([0.7])
    assert population_risk(dist, obj, w) == pytest.approx(obj.value(w, np.array([1.0])))


def test_population_risk_maxcoord_hand_expansion():
    # F_D(w) = -(gamma*L/2) * (1/(n+1)) * sum(w) + (L/2) * max_i(w_i - eps_i, 0)
    params = MaxCoordParams(lipschitz=1.0, eta=0.1, steps=4, n=6, d=8)
    obj = params.objective()
    dist = params.distribution()
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = rng.normal(scale=0.1, size=8)
        drift = -(params.gamma * 1.0 / 2.0) * (1.0 / 7.0) * float(w.sum())
        kink = 0.5 * max(0.0, float(np.max(w - params.epsilons)))
        assert population_risk(dist, obj, w) == pytest.approx(drift + kink, abs=1e-14)


def test_population_subgrad_matches_central_differences():
    obj, dist, _, _ = hinge_instance()
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(50):
        w = rng.normal(scale=1.5, size=2)
        a = dist.atoms[:, :2] @ w
        # skip kink neighborhoods so the risk is differentiable at w
        if np.any(np.abs(dist.atoms[:, 2] * a - 1.0) < 1e-3):
            continue
        g = population_subgrad(dist, obj, w)
        h = 1e-7
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            fd = (population_risk(dist, obj, w + e) - population_risk(dist, obj, w - e)) / (2 * h)
            assert fd == pytest.approx(g[i], abs=1e-6)
        checked += 1
    assert checked >= 30


def test_population_risk_dimension_mismatch():
    obj = GlmObjective(ScalarLoss("hinge"), dim=3)
    dist = rademacher_dist()  # instance_dim 1, GLM wants 4
    with pytest.raises(DimensionMismatch):
        population_risk(dist, obj, np.zeros(3))


def test_hoeffding_band_empirical_vs_population():
    # |F_S(w) - F_D(w)| <= 5 * (L*||w|| + c) / sqrt(n) at n = 1e5, where c
    # is the largest attainable |loss(0, y)| over the support
    obj, dist, loss, _ = hinge_instance()
    n = 100_000
    S = sample(dist, n, seed=21)
    rng = np.random.default_rng(22)
    c = max(abs(loss.value(0.0, y)) for y in np.unique(dist.atoms[:, -1]))
    for _ in range(10):
        w = rng.normal(scale=1.0, size=2)
        gap = abs(empirical_risk(obj, S, w) - population_risk(dist, obj, w))
        band = 5.0 * (obj.lipschitz * float(np.linalg.norm(w)) + c) / math.sqrt(n)
        assert gap <= band


def test_population_quantities_bit_identical():
    obj, dist, _, _ = hinge_instance()
    w = np.array([0.3, -0.4])
    assert population_risk(dist, obj, w) == population_risk(dist, obj, w)
    a = population_subgrad(dist, obj, w)
    b = population_subgrad(dist, obj, w)
    assert np.array_equal(a, b)
