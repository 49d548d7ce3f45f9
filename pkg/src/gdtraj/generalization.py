"""Generalization reports: clipped risks, complexity estimates, rate curves.

Everything here works against finite-support distributions so population
quantities are exact sums; the only randomness is the sample draw (and the
sign draws of the complexity estimator).

The high-probability excess-risk envelope is evaluated with the explicit
constants of its derivation (probability split delta/4 + delta/8 + delta/2):

    min_w [ F_D(w) + ||w||^2/(eta*T) + ||w||*L*sqrt(2*log(2/delta)/n) ]
      + 2*eta*L^2
      + 12*(eta*L^2*T/n)*sqrt(log(4*T/delta))
      + 8*eta*L^2*sqrt(T)/sqrt(n)
      + c*sqrt(2*log(8/delta)/n) + c*sqrt(2*log(2/delta)/n)

with c the declared loss bound on the clip interval.  The comparator
minimum is evaluated over a norm grid along the oracle direction, i.e. an
upper bound on the true infimum, which only tightens the check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._pool import parallel_map
from .distributions import (
    FiniteDistribution,
    SampleSet,
    mix64,
    population_risk,
    sample,
)
from .engine import (
    GdConfig,
    average_iterate,
    constrained_erm_oracle,
    gd_run_empirical,
)
from .errors import ConfigurationError, DimensionMismatch
from .objectives import GlmObjective, Objective, ScalarLoss


@dataclass(frozen=True)
class ShiftedBall:
    """A Euclidean ball {w : ||w - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        center.flags.writeable = False
        object.__setattr__(self, "center", center)
        if not self.radius >= 0:
            raise ConfigurationError("ball radius must be >= 0")


@dataclass(frozen=True)
class ClipSpec:
    """Clamp interval [-b, b] and the loss bound c valid on it."""

    b: float
    c: float

    def __post_init__(self):
        if not (self.b > 0 and self.c > 0):
            raise ConfigurationError("clip parameters must be > 0")


def clip(a, spec: ClipSpec):
    """Clamp predictions into [-b, b]; elementwise on arrays."""
    return np.clip(a, -spec.b, spec.b)


def validate_clip_compatibility(loss: ScalarLoss, spec: ClipSpec, labels) -> None:
    """Check (on a grid) that the loss honors the declared clip contract.

    Requires |loss(a, y)| <= c on [-b, b] and loss(a, y) >=
    loss(sign(a)*|y|, y) once |a| >= |y|, for every label that occurs; this
    is what makes clamping a no-regret postprocessing step.
    """
    labels = np.unique(np.asarray(labels, dtype=float))
    inside = np.linspace(-spec.b, spec.b, 257)
    for y in labels:
        if abs(y) > spec.b + 1e-12:
            raise ConfigurationError("labels must lie inside the clip interval")
        vals = loss.value(inside, y)
        if np.max(np.abs(vals)) > spec.c + 1e-9:
            raise ConfigurationError(
                f"loss exceeds declared bound c={spec.c} on the clip interval"
            )
        beyond = abs(y) + np.linspace(0.0, 4.0 * spec.b, 129)
        for sign in (1.0, -1.0):
            a = sign * beyond
            vals = loss.value(a, y)
            ref = loss.value(sign * abs(y), y)
            if np.min(vals - ref) < -1e-9:
                raise ConfigurationError(
                    "loss decreases beyond |y|; clamping could increase it"
                )


def clipped_population_risk(
    dist: FiniteDistribution, loss: ScalarLoss, spec: ClipSpec, w: np.ndarray
) -> float:
    """Exact population risk of the clamped linear predictor."""
    obj = _glm_for(dist, loss)
    X, y = obj.split(dist.atoms)
    a = clip(X @ np.asarray(w, dtype=float), spec)
    return float(loss.value(a, y) @ dist.probs)


def _glm_for(dist: FiniteDistribution, loss: ScalarLoss) -> GlmObjective:
    return GlmObjective(loss, dim=dist.instance_dim - 1)


def excess_population_risk(
    dist: FiniteDistribution,
    obj: Objective,
    w: np.ndarray,
    radius: float,
    oracle_budget: int = 100_000,
) -> tuple[float, float]:
    """F_D(w) minus the constrained population minimum (oracle tolerance attached)."""
    ref = constrained_erm_oracle(obj, dist, radius, budget=oracle_budget)
    return population_risk(dist, obj, w) - ref.value, ref.tolerance


# ---------------------------------------------------------------------------
# complexity estimates
# ---------------------------------------------------------------------------

def _features_of(data) -> np.ndarray:
    if isinstance(data, SampleSet):
        Z = data.instances
        return Z[:, :-1]
    Z = np.asarray(data, dtype=float)
    return Z


def rademacher_linear(data, radius: float, m_sigma: int, seed: int) -> tuple[float, float]:
    """Sign-average complexity of the radius-K linear class on a sample.

    Per sign vector the exact supremum over the ball is K*||sum_i s_i*phi_i||/n;
    the estimate averages m_sigma draws and ships its standard error.  Center
    shifts of the ball do not change this value.  Passing a SampleSet strips
    the label column; a raw array is taken as features directly.
    """
    if m_sigma < 2:
        raise ConfigurationError("need at least two sign draws")
    X = _features_of(data)
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(m_sigma, n)) * 2.0 - 1.0
    sups = float(radius) * np.linalg.norm(signs @ X, axis=1) / n
    est = float(sups.mean())
    stderr = float(sups.std(ddof=1) / math.sqrt(m_sigma))
    return est, stderr


@dataclass(frozen=True)
class BallComplexity:
    """Contraction upper estimate and direct finite-candidate lower estimate."""

    contraction: float
    contraction_stderr: float
    direct: float
    direct_stderr: float


def rademacher_glm_ball(
    data: SampleSet,
    loss: ScalarLoss,
    ball: ShiftedBall,
    m_sigma: int,
    seed: int,
    candidates: int = 64,
) -> BallComplexity:
    """Complexity of the loss class over a shifted ball.

    The contraction route multiplies the linear-class value by the loss
    Lipschitz constant and is exactly invariant to the ball center (same
    sign draws, center never enters).  The direct route maximizes the
    sign-weighted empirical loss over a fixed candidate set inside the ball
    (center, axis points, random directions) and is a lower estimate of the
    true supremum.
    """
    if not isinstance(data, SampleSet):
        raise ConfigurationError("rademacher_glm_ball expects a SampleSet")
    X = data.instances[:, :-1]
    y = data.instances[:, -1]
    n, d = X.shape
    if ball.center.shape != (d,):
        raise DimensionMismatch("ball center dimension does not match features")
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(m_sigma, n)) * 2.0 - 1.0

    lin = float(ball.radius) * np.linalg.norm(signs @ X, axis=1) / n
    contraction = loss.lipschitz * lin

    dirs = [np.zeros(d)]
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        dirs.extend([e, -e])
    extra = rng.standard_normal((max(0, candidates - len(dirs)), d))
    norms = np.linalg.norm(extra, axis=1, keepdims=True)
    dirs.extend(list(extra / np.maximum(norms, 1e-12)))
    W = ball.center + ball.radius * np.stack(dirs)  # (m_cand, d)

    losses = loss.value(W @ X.T, y)                 # (m_cand, n)
    direct = np.max(losses @ signs.T, axis=0) / n   # (m_sigma,)

    return BallComplexity(
        contraction=float(contraction.mean()),
        contraction_stderr=float(contraction.std(ddof=1) / math.sqrt(m_sigma)),
        direct=float(direct.mean()),
        direct_stderr=float(direct.std(ddof=1) / math.sqrt(m_sigma)),
    )


# ---------------------------------------------------------------------------
# high-probability clipped-risk experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HpBound:
    """Explicit high-probability envelope split into named terms."""

    delta: float
    comparator: float          # min_w [F_D + ||w||^2/(eta T) + ||w|| L sqrt(2 log(2/d)/n)]
    comparator_norm: float
    optimization: float        # 2 eta L^2
    drift: float               # 12 (eta L^2 T / n) sqrt(log(4T/d))
    diffusion: float           # 8 eta L^2 sqrt(T)/sqrt(n)
    tail: float                # c [sqrt(2 log(8/d)/n) + sqrt(2 log(2/d)/n)]

    @property
    def total(self) -> float:
        return self.comparator + self.optimization + self.drift + self.diffusion + self.tail


def hp_bound(
    dist: FiniteDistribution,
    obj: Objective,
    cfg: GdConfig,
    n: int,
    delta: float,
    c: float,
    direction: np.ndarray,
    max_norm: float,
    norm_grid: int = 81,
) -> HpBound:
    """Evaluate the explicit envelope; comparator minimized along ``direction``.

    The candidate set is {0} plus ``norm_grid`` scalings of the unit
    ``direction`` up to ``max_norm``; any candidate upper-bounds the true
    comparator infimum, so the reported envelope is conservative-tight.
    """
    if not 0.0 < delta < 1.0:
        raise ConfigurationError("delta must lie in (0, 1)")
    L = obj.lipschitz
    eta, T = cfg.eta, cfg.steps
    u = np.asarray(direction, dtype=float)
    nu = float(np.linalg.norm(u))
    u = u / nu if nu > 0 else u
    reg_root = L * math.sqrt(2.0 * math.log(2.0 / delta) / n)

    best_val, best_norm = math.inf, 0.0
    for s in np.linspace(0.0, max_norm, norm_grid):
        w = s * u
        val = population_risk(dist, obj, w) + s**2 / (eta * T) + s * reg_root
        if val < best_val:
            best_val, best_norm = float(val), float(s)

    return HpBound(
        delta=delta,
        comparator=best_val,
        comparator_norm=best_norm,
        optimization=2.0 * eta * L**2,
        drift=12.0 * (eta * L**2 * T / n) * math.sqrt(math.log(4.0 * T / delta)),
        diffusion=8.0 * eta * L**2 * math.sqrt(T) / math.sqrt(n),
        tail=c
        * (
            math.sqrt(2.0 * math.log(8.0 / delta) / n)
            + math.sqrt(2.0 * math.log(2.0 / delta) / n)
        ),
    )


def _clipped_worker(payload):
    obj, dist, loss, spec, n, cfg, seed, r, ref_value = payload
    S = sample(dist, n, seed, r)
    wbar = average_iterate(gd_run_empirical(obj, S, cfg))
    clipped = clipped_population_risk(dist, loss, spec, wbar)
    unclipped = population_risk(dist, obj, wbar)
    return clipped - ref_value, unclipped - ref_value


@dataclass(frozen=True)
class QuantileRow:
    delta: float
    quantile_clipped: float
    bound_excess: float
    bound: HpBound


@dataclass(frozen=True)
class ClippedQuantileSummary:
    """Per-replicate clipped/unclipped excess with quantile-vs-envelope rows.

    Excesses are relative to the constrained population minimum over the
    radius-B ball (the same reference enters the envelope side, so the
    quantile-vs-envelope comparison is reference-independent).
    """

    n: int
    replicates: int
    eta: float
    steps: int
    radius: float
    clip: ClipSpec
    ref_value: float
    ref_tolerance: float
    excess_clipped: np.ndarray
    excess_unclipped: np.ndarray
    rows: tuple[QuantileRow, ...]


def clipped_risk_quantiles(
    dist: FiniteDistribution,
    loss: ScalarLoss,
    spec: ClipSpec,
    n: int,
    cfg: GdConfig,
    replicates: int,
    seed: int,
    radius: float = 1.0,
    deltas: tuple[float, ...] = (0.1, 0.01),
    oracle_budget: int = 200_000,
    workers: int = 1,
) -> ClippedQuantileSummary:
    """Empirical (1-delta)-quantiles of clipped excess risk vs the explicit envelope."""
    if replicates < 2:
        raise ConfigurationError("need at least two replicates")
    obj = _glm_for(dist, loss)
    validate_clip_compatibility(loss, spec, dist.atoms[:, -1])
    ref = constrained_erm_oracle(obj, dist, radius, budget=oracle_budget)

    payloads = [
        (obj, dist, loss, spec, n, cfg, seed, r, ref.value) for r in range(replicates)
    ]
    rows = parallel_map(_clipped_worker, payloads, workers)
    excess_clipped = np.array([r[0] for r in rows])
    excess_unclipped = np.array([r[1] for r in rows])

    direction = ref.w if float(np.linalg.norm(ref.w)) > 0 else np.ones(obj.dim)
    out_rows = []
    for delta in deltas:
        bound = hp_bound(
            dist, obj, cfg, n, delta, spec.c, direction, max_norm=2.0 * radius
        )
        q = float(np.quantile(excess_clipped, 1.0 - delta, method="higher"))
        out_rows.append(
            QuantileRow(
                delta=delta,
                quantile_clipped=q,
                bound_excess=bound.total - ref.value,
                bound=bound,
            )
        )
    return ClippedQuantileSummary(
        n=n,
        replicates=replicates,
        eta=cfg.eta,
        steps=cfg.steps,
        radius=radius,
        clip=spec,
        ref_value=ref.value,
        ref_tolerance=ref.tolerance,
        excess_clipped=excess_clipped,
        excess_unclipped=excess_unclipped,
        rows=tuple(out_rows),
    )


# ---------------------------------------------------------------------------
# mean excess-risk rate over a sample-size grid
# ---------------------------------------------------------------------------

def _excess_worker(payload):
    obj, dist, n, cfg, seed, r, ref_value = payload
    S = sample(dist, n, seed, r)
    wbar = average_iterate(gd_run_empirical(obj, S, cfg))
    return population_risk(dist, obj, wbar) - ref_value


@dataclass(frozen=True)
class ExcessRatePoint:
    n: int
    eta: float
    steps: int
    mean_excess: float
    stderr: float


@dataclass(frozen=True)
class ExcessRateCurve:
    points: tuple[ExcessRatePoint, ...]
    ref_value: float
    ref_tolerance: float
    radius: float


def excess_risk_curve(
    dist: FiniteDistribution,
    obj: Objective,
    n_list,
    replicates: int,
    seed: int,
    radius: float = 1.0,
    oracle_budget: int = 1_000_000,
    workers: int = 1,
    schedule=None,
) -> ExcessRateCurve:
    """Mean excess population risk of the average iterate at eta=1/(L*sqrt(n)), T=n.

    ``schedule`` (n -> GdConfig) overrides the default tuning.  The
    constrained population reference is computed once (it does not depend
    on n); per-n replicate streams are decorrelated by folding n into the
    seed.
    """
    if replicates < 2:
        raise ConfigurationError("need at least two replicates")
    ref = constrained_erm_oracle(obj, dist, radius, budget=oracle_budget)
    points = []
    for n in [int(v) for v in n_list]:
        if schedule is None:
            cfg = GdConfig(eta=1.0 / (obj.lipschitz * math.sqrt(n)), steps=n)
        else:
            cfg = schedule(n)
        seed_n = mix64(seed, n)
        payloads = [
            (obj, dist, n, cfg, seed_n, r, ref.value) for r in range(replicates)
        ]
        vals = np.array(parallel_map(_excess_worker, payloads, workers))
        points.append(
            ExcessRatePoint(
                n=n,
                eta=cfg.eta,
                steps=cfg.steps,
                mean_excess=float(vals.mean()),
                stderr=float(vals.std(ddof=1) / math.sqrt(replicates)),
            )
        )
    return ExcessRateCurve(
        points=tuple(points),
        ref_value=ref.value,
        ref_tolerance=ref.tolerance,
        radius=radius,
    )
