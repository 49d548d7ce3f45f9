"""Clipping, complexity estimates, explicit envelopes, excess-risk rates."""

import math

import numpy as np
import pytest

from gdtraj import (
    BallComplexity,
    ClipSpec,
    ConfigurationError,
    GdConfig,
    SampleSet,
    ScalarLoss,
    ShiftedBall,
    clip,
    clipped_population_risk,
    clipped_risk_quantiles,
    constrained_erm_oracle,
    excess_population_risk,
    excess_risk_curve,
    hp_bound,
    make_preset,
    population_risk,
    rademacher_glm_ball,
    rademacher_linear,
    sample,
    validate_clip_compatibility,
)


# ---------------------------------------------------------------------------
# clipping
# ---------------------------------------------------------------------------

def test_clip_basics():
    spec = ClipSpec(b=1.0, c=2.0)
    assert clip(0.5, spec) == 0.5
    assert clip(3.0, spec) == 1.0
    assert clip(-3.0, spec) == -1.0
    a = np.array([-5.0, -1.0, 0.0, 0.3, 9.0])
    out = clip(a, spec)
    assert np.array_equal(out, np.array([-1.0, -1.0, 0.0, 0.3, 1.0]))
    assert np.array_equal(clip(out, spec), out)


def test_clip_spec_validation():
    with pytest.raises(ConfigurationError):
        ClipSpec(b=0.0, c=1.0)
    with pytest.raises(ConfigurationError):
        ClipSpec(b=1.0, c=-1.0)


def test_clip_never_increases_hinge_loss():
    spec = ClipSpec(b=1.0, c=2.0)
    loss = ScalarLoss("hinge")
    rng = np.random.default_rng(3)
    a = rng.normal(scale=4.0, size=10_000)
    for y in (-1.0, 1.0):
        before = loss.value(a, y)
        after = loss.value(clip(a, spec), y)
        assert np.all(after <= before + 1e-12)


def test_validate_clip_compatibility_accepts_hinge():
    validate_clip_compatibility(ScalarLoss("hinge"), ClipSpec(1.0, 2.0), [-1.0, 1.0])


def test_validate_clip_rejects_small_bound():
    # hinge reaches 2 at the left edge of [-1, 1] for label +1
    with pytest.raises(ConfigurationError):
        validate_clip_compatibility(ScalarLoss("hinge"), ClipSpec(1.0, 1.5), [1.0])


def test_validate_clip_rejects_outside_labels():
    with pytest.raises(ConfigurationError):
        validate_clip_compatibility(ScalarLoss("hinge"), ClipSpec(1.0, 2.0), [2.0])


def test_validate_clip_rejects_decreasing_loss():
    # the linear loss keeps decreasing as predictions grow more negative,
    # so clamping could raise it
    with pytest.raises(ConfigurationError):
        validate_clip_compatibility(ScalarLoss("linear"), ClipSpec(1.0, 2.0), [1.0])


def test_clipped_population_risk_hand_values():
    preset = make_preset("hinge")
    dist, loss, spec = preset.distribution, preset.loss, preset.clip
    w = 2.0 * np.array([0.6, 0.8])
    # margins: 2 on the u-atoms (clipped to 1), 0 on the v-atoms
    assert clipped_population_risk(dist, loss, spec, w) == pytest.approx(
        0.075 * 2.0 + 0.5 * 1.0
    )
    obj = preset.objective
    assert population_risk(dist, obj, w) == pytest.approx(0.075 * 3.0 + 0.5 * 1.0)


def test_excess_at_population_minimizer():
    preset = make_preset("hinge")
    w_star = np.array([0.6, 0.8])
    excess, tol = excess_population_risk(preset.distribution, preset.objective, w_star, radius=1.0)
    assert -tol <= excess <= 1e-12


def test_shifted_ball_validation():
    with pytest.raises(ConfigurationError):
        ShiftedBall(center=np.zeros(2), radius=-1.0)


# ---------------------------------------------------------------------------
# complexity estimates
# ---------------------------------------------------------------------------

def test_rademacher_linear_orthonormal_exact():
    # two orthonormal feature rows: every sign pattern has norm sqrt(2)
    X = np.eye(2)
    est, stderr = rademacher_linear(X, radius=3.0, m_sigma=50, seed=5)
    assert est == pytest.approx(3.0 * math.sqrt(2.0) / 2.0)
    assert stderr == pytest.approx(0.0, abs=1e-15)


def test_rademacher_linear_single_point_exact():
    X = np.array([[0.6, 0.8]])
    est, stderr = rademacher_linear(X, radius=2.0, m_sigma=10, seed=7)
    assert est == pytest.approx(2.0)
    assert stderr == pytest.approx(0.0, abs=1e-15)


def test_rademacher_linear_scale_and_ceiling():
    preset = make_preset("hinge")
    S = sample(preset.distribution, 64, seed=11)
    est, stderr = rademacher_linear(S, radius=1.0, m_sigma=2_000, seed=13)
    assert 0.0 < est <= 1.0 / math.sqrt(64) + 5.0 * stderr
    est2, _ = rademacher_linear(S, radius=2.0, m_sigma=2_000, seed=13)
    assert est2 == pytest.approx(2.0 * est)


def test_rademacher_linear_seed_agreement():
    preset = make_preset("hinge")
    S = sample(preset.distribution, 100, seed=17)
    a, sa = rademacher_linear(S, 1.0, 20_000, seed=19)
    b, sb = rademacher_linear(S, 1.0, 20_000, seed=23)
    assert abs(a - b) <= 5.0 * math.hypot(sa, sb)


def test_rademacher_linear_strips_labels():
    preset = make_preset("hinge")
    S = sample(preset.distribution, 32, seed=29)
    raw = S.instances[:, :-1]
    assert rademacher_linear(S, 1.0, 64, seed=31) == rademacher_linear(raw, 1.0, 64, seed=31)


def test_rademacher_linear_needs_two_draws():
    with pytest.raises(ConfigurationError):
        rademacher_linear(np.eye(2), 1.0, 1, seed=1)


def test_glm_ball_contraction_shift_invariant():
    preset = make_preset("hinge")
    S = sample(preset.distribution, 40, seed=37)
    rng = np.random.default_rng(41)
    base = rademacher_glm_ball(
        S, preset.loss, ShiftedBall(np.zeros(2), 1.0), m_sigma=200, seed=43
    )
    for _ in range(25):
        center = rng.normal(size=2) * 10.0
        shifted = rademacher_glm_ball(
            S, preset.loss, ShiftedBall(center, 1.0), m_sigma=200, seed=43
        )
        assert shifted.contraction == base.contraction
        assert shifted.contraction_stderr == base.contraction_stderr


def test_glm_ball_direct_below_contraction():
    # with the ball at the origin the sign-average of the centered loss class
    # is dominated by the Lipschitz contraction of the linear class
    preset = make_preset("hinge")
    S = sample(preset.distribution, 50, seed=47)
    out = rademacher_glm_ball(
        S, preset.loss, ShiftedBall(np.zeros(2), 1.0), m_sigma=4_000, seed=53
    )
    assert isinstance(out, BallComplexity)
    slack = 4.0 * math.hypot(out.contraction_stderr, out.direct_stderr)
    assert out.direct <= out.contraction + slack


def test_glm_ball_requires_sample_set():
    with pytest.raises(ConfigurationError):
        rademacher_glm_ball(np.eye(3), ScalarLoss("hinge"), ShiftedBall(np.zeros(2), 1.0), 8, 1)


# ---------------------------------------------------------------------------
# explicit high-probability envelope
# ---------------------------------------------------------------------------

def test_hp_bound_term_arithmetic():
    preset = make_preset("hinge")
    obj, dist = preset.objective, preset.distribution
    eta, T, n, delta, c = 0.125, 64, 256, 0.01, 2.0
    u = np.array([0.6, 0.8])
    bound = hp_bound(dist, obj, GdConfig(eta=eta, steps=T), n, delta, c, u, max_norm=2.0)

    assert bound.optimization == pytest.approx(2.0 * eta)
    assert bound.drift == pytest.approx(12.0 * (eta * T / n) * math.sqrt(math.log(4.0 * T / delta)))
    assert bound.diffusion == pytest.approx(8.0 * eta * math.sqrt(T) / math.sqrt(n))
    assert bound.tail == pytest.approx(
        c * (math.sqrt(2.0 * math.log(8.0 / delta) / n) + math.sqrt(2.0 * math.log(2.0 / delta) / n))
    )
    reg = math.sqrt(2.0 * math.log(2.0 / delta) / n)
    grid = np.linspace(0.0, 2.0, 81)
    vals = [population_risk(dist, obj, s * u) + s**2 / (eta * T) + s * reg for s in grid]
    assert bound.comparator == pytest.approx(min(vals))
    assert bound.comparator_norm == pytest.approx(grid[int(np.argmin(vals))])
    assert bound.total == pytest.approx(
        bound.comparator + bound.optimization + bound.drift + bound.diffusion + bound.tail
    )


def test_hp_bound_delta_validation():
    preset = make_preset("hinge")
    with pytest.raises(ConfigurationError):
        hp_bound(preset.distribution, preset.objective, GdConfig(eta=0.1, steps=4),
                 16, 0.0, 1.0, np.ones(2), 1.0)


# ---------------------------------------------------------------------------
# clipped-risk quantiles
# ---------------------------------------------------------------------------

def test_clipped_quantiles_small_run():
    preset = make_preset("hinge")
    T = 32
    cfg = GdConfig(eta=1.0 / math.sqrt(T), steps=T)
    summary = clipped_risk_quantiles(
        preset.distribution, preset.loss, preset.clip,
        n=64, cfg=cfg, replicates=60, seed=59, radius=1.0,
        deltas=(0.1,), oracle_budget=20_000,
    )
    assert summary.excess_clipped.shape == (60,)
    assert np.all(summary.excess_clipped <= summary.excess_unclipped + 1e-12)
    assert summary.ref_tolerance > 0.0
    row = summary.rows[0]
    assert row.delta == 0.1
    assert row.quantile_clipped <= row.bound_excess
    assert row.bound_excess == pytest.approx(row.bound.total - summary.ref_value)


def test_clipped_quantiles_deterministic():
    preset = make_preset("hinge")
    cfg = GdConfig(eta=0.2, steps=8)
    kw = dict(n=16, replicates=8, seed=61, radius=1.0, deltas=(0.25,), oracle_budget=2_000)
    a = clipped_risk_quantiles(preset.distribution, preset.loss, preset.clip, cfg=cfg, **kw)
    b = clipped_risk_quantiles(preset.distribution, preset.loss, preset.clip, cfg=cfg, workers=2, **kw)
    assert np.array_equal(a.excess_clipped, b.excess_clipped)
    assert a.rows == b.rows


def test_clipped_quantiles_needs_replicates():
    preset = make_preset("hinge")
    with pytest.raises(ConfigurationError):
        clipped_risk_quantiles(
            preset.distribution, preset.loss, preset.clip,
            n=8, cfg=GdConfig(eta=0.1, steps=2), replicates=1, seed=1,
        )


# ---------------------------------------------------------------------------
# excess-risk rate curve
# ---------------------------------------------------------------------------

def test_excess_curve_deterministic_instance_exact():
    # single-atom drift objective: the trajectory is deterministic, so the
    # mean excess equals the closed-form average iterate against the ball
    # minimum and the spread is exactly zero
    preset = make_preset("origin-drift", n=16)
    curve = excess_risk_curve(
        preset.distribution, preset.objective, n_list=[16], replicates=3,
        seed=67, radius=1.0, oracle_budget=50_000,
    )
    point = curve.points[0]
    assert point.eta == pytest.approx(0.25)
    assert point.steps == 16
    wbar = -point.eta * (point.steps + 1.0) / 2.0
    assert point.stderr == 0.0
    assert point.mean_excess == pytest.approx(wbar + 1.0, abs=curve.ref_tolerance)


def test_excess_curve_schedule_override_and_decay():
    preset = make_preset("hinge")
    curve = excess_risk_curve(
        preset.distribution, preset.objective, n_list=[16, 64, 256],
        replicates=60, seed=71, radius=1.0, oracle_budget=20_000,
        schedule=lambda n: GdConfig(eta=1.0 / math.sqrt(n), steps=n),
    )
    assert [p.n for p in curve.points] == [16, 64, 256]
    assert all(p.eta == pytest.approx(1.0 / math.sqrt(p.n)) for p in curve.points)
    assert curve.points[-1].mean_excess < curve.points[0].mean_excess
    assert all(p.mean_excess > 0.0 for p in curve.points)


def test_excess_curve_needs_replicates():
    preset = make_preset("hinge")
    with pytest.raises(ConfigurationError):
        excess_risk_curve(preset.distribution, preset.objective, [8], 1, seed=1)
