"""Worst-case instances with closed-form descent trajectories.

Three families:

* signed drift f(w; z) = L * w * z with z = +/-1 equiprobable, whose
  trajectory is w_t = -eta*L*t*mean(z) and whose two-sample trajectory gap
  has an exactly computable probability of exceeding eta*L*t/sqrt(n);
* a drift-plus-max-coordinate objective on {0,1} instances whose
  conditioned trajectory walks through the coordinates in order and keeps
  norm Omega(eta*L*sqrt(t));
* two deterministic one-dimensional drifts ("g4-drift", "g4-scaled-drift")
  realizing the best achievable max(empirical suboptimality, norm-based
  term) tradeoff, Theta(L / n^{1/4}).

Closed forms use engine indexing throughout: iterate t is the weight after
t update steps.  Texts that write the same state as step t+1 differ from
these formulas by exactly that shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import FiniteDistribution, SampleSet
from .engine import GdConfig, Trajectory, gd_run_empirical
from .errors import ConfigurationError
from .objectives import LinearObjective, MaxCoordObjective

EXACT_GAP_MAX_N = 40

# The conditioned-trajectory norm floor ||w_t|| >= NORM_FLOOR_COEF * eta * L * sqrt(t-1)
# (t-1 = coordinates consumed by engine iterate t).
NORM_FLOOR_COEF = 3.0 / 8.0

# Joint conditioning-event floor 0.5 * (1 - exp(-1/2)); the measured joint
# probability p*(1-p) with p = (1 - 1/(n+1))^n in (1/e, 1/2] always clears it.
JOINT_EVENT_FLOOR = 0.5 * (1.0 - math.exp(-0.5))


# ---------------------------------------------------------------------------
# signed drift (scalar +/-1 instances)
# ---------------------------------------------------------------------------

def signed_drift_instance(lipschitz: float = 1.0, dim: int = 1):
    """(objective, distribution) for the +/-1 signed drift."""
    obj = LinearObjective(lipschitz=lipschitz, dim=dim)
    dist = FiniteDistribution(atoms=np.array([[-1.0], [1.0]]), probs=np.array([0.5, 0.5]))
    return obj, dist


def linear_drift_iterate(lipschitz: float, eta: float, mean_z: float, t: int) -> float:
    """Closed-form iterate of the signed drift: w_t = -eta*L*t*mean_z.

    Engine indexing (t update steps from w_0 = 0); conventions indexing the
    same state as step t+1 yield -eta*L*(t-1)*mean_z at their t.
    """
    if t < 0:
        raise ConfigurationError("t must be >= 0")
    return -eta * lipschitz * t * float(mean_z)


def gap_probability_exact(n: int) -> float:
    """P(|mean(z) - mean(z')| >= 1/sqrt(n)) for two independent n-samples of signs.

    Exact enumeration through the distribution of the difference of sign
    counts: with X, Y ~ Binomial(n, 1/2) independent, mean(z) - mean(z')
    = 2*(X - Y)/n and P(X - Y = k) = C(2n, n+k) / 4^n, so the tail is a
    finite integer-arithmetic sum.  Capped at n <= 40; larger n use the
    Monte-Carlo estimator.
    """
    if not 1 <= n <= EXACT_GAP_MAX_N:
        raise ConfigurationError(f"exact mode supports 1 <= n <= {EXACT_GAP_MAX_N}")
    # |2(X - Y)| >= n / sqrt(n) = sqrt(n)  <=>  |X - Y| >= ceil(sqrt(n)/2);
    # the threshold is the smallest integer j with 4j^2 >= n (no floating point).
    j = 0
    while 4 * j * j < n:
        j += 1
    total = 4**n
    inside = sum(math.comb(2 * n, n + k) for k in range(-(j - 1), j)) if j > 0 else 0
    return float((total - inside) / total)


def gap_probability_mc(n: int, replicates: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate (and its standard error) of the two-sample gap probability.

    Samples the sign sums directly as Binomial(n, 1/2) counts: the mean of n
    independent signs equals (2X - n)/n in distribution, so this is the same
    experiment as drawing 2*n*replicates individual signs, only faster.
    """
    if n < 1 or replicates < 1:
        raise ConfigurationError("n and replicates must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.binomial(n, 0.5, size=replicates)
    y = rng.binomial(n, 0.5, size=replicates)
    gaps = 2.0 * np.abs(x.astype(np.int64) - y.astype(np.int64)) / n
    hits = gaps >= 1.0 / np.sqrt(n) - 1e-12
    p = float(hits.mean())
    stderr = float(np.sqrt(max(p * (1.0 - p), 1e-300) / replicates))
    return p, stderr


# ---------------------------------------------------------------------------
# drift-plus-max-coordinate construction ({0,1} instances)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaxCoordParams:
    """Parameters of the drift-plus-max-coordinate instance.

    d > steps is required (one fresh coordinate is consumed per step);
    gamma = 1/(4*sqrt(d*steps)) exactly; the offsets eps_i = (i/(d+1)) *
    gamma*eta*L/(2n) for i = 1..d are strictly increasing and all smaller
    than the smallest possible one-step drift gamma*eta*L/(2n), which is
    what locks the conditioned trajectory into consuming coordinates in
    order.
    """

    lipschitz: float
    eta: float
    steps: int
    n: int
    d: int

    def __post_init__(self):
        if self.d <= self.steps:
            raise ConfigurationError("need d > steps")
        if self.n < 1 or self.steps < 1:
            raise ConfigurationError("n and steps must be >= 1")
        if not (self.eta > 0 and self.lipschitz > 0):
            raise ConfigurationError("eta and lipschitz must be > 0")

    @property
    def gamma(self) -> float:
        return 1.0 / (4.0 * math.sqrt(self.d * self.steps))

    @property
    def epsilons(self) -> np.ndarray:
        cap = self.gamma * self.eta * self.lipschitz / (2.0 * self.n)
        i = np.arange(1, self.d + 1, dtype=float)
        return (i / (self.d + 1.0)) * cap

    def objective(self) -> MaxCoordObjective:
        return MaxCoordObjective(
            lipschitz=self.lipschitz, gamma=self.gamma, epsilons=self.epsilons
        )

    def distribution(self) -> FiniteDistribution:
        p_one = 1.0 / (self.n + 1.0)
        return FiniteDistribution(
            atoms=np.array([[0.0], [1.0]]), probs=np.array([1.0 - p_one, p_one])
        )


@dataclass(frozen=True)
class EventOdds:
    """Probabilities of the conditioning events of the max-coord argument.

    p_allzero: the comparison sample contains no 1s, exactly (1-1/(n+1))^n;
    p_hit: the primary sample contains at least one 1 (its complement);
    p_joint: both at once (independent samples);
    p_joint_floor: the distribution-free floor 0.5*(1 - e^{-1/2});
    p_allzero_nform: the neighboring (1 - 1/n)^n variant, reported for
    comparison (it underestimates p_allzero).
    """

    p_allzero: float
    p_hit: float
    p_joint: float
    p_joint_floor: float
    p_allzero_nform: float


def maxcoord_event_probability(n: int) -> EventOdds:
    """Exact conditioning-event probabilities for sample size n."""
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    p_allzero = (1.0 - 1.0 / (n + 1.0)) ** n
    p_hit = 1.0 - p_allzero
    nform = (1.0 - 1.0 / n) ** n if n > 1 else 0.0
    return EventOdds(
        p_allzero=p_allzero,
        p_hit=p_hit,
        p_joint=p_allzero * p_hit,
        p_joint_floor=JOINT_EVENT_FLOOR,
        p_allzero_nform=nform,
    )


def maxcoord_closed_form(params: MaxCoordParams, sum_z: int, t: int) -> np.ndarray:
    """Closed-form engine iterate t of the conditioned trajectory.

    Requires sum_z >= 1 (the conditioning event).  The drift lifts every
    coordinate by c = gamma*eta*L*sum_z/(2n) per step while the max term
    knocks down one fresh coordinate per step, in index order:

        w_t = t*c*1  -  (eta*L/2) * sum_{s<=t-1} e_s.
    """
    if not 0 <= t <= params.steps:
        raise ConfigurationError("t must lie in [0, steps]")
    if sum_z < 1:
        raise ConfigurationError("closed form requires at least one z_i = 1")
    c = params.gamma * params.eta * params.lipschitz * sum_z / (2.0 * params.n)
    w = np.full(params.d, t * c)
    k = min(t - 1, params.d) if t >= 1 else 0
    if k > 0:
        w[:k] -= params.eta * params.lipschitz / 2.0
    return w


@dataclass(frozen=True)
class MaxCoordCheck:
    matches: bool
    lower_bound_holds: bool
    max_abs_error: float
    min_norm_margin: float


def maxcoord_trajectory_check(
    params: MaxCoordParams, sample_z: np.ndarray, tol: float = 1e-10
) -> MaxCoordCheck:
    """Engine-vs-closed-form agreement plus the norm floor, conditioned on sum_z >= 1.

    The floor is ||w_t|| >= (3/8)*eta*L*sqrt(t-1) for engine iterates
    t = 1..steps (t-1 is the number of consumed coordinates; the iterate
    after consuming t coordinates is w_{t+1}).
    """
    z = np.asarray(sample_z, dtype=float).reshape(-1)
    if z.shape[0] != params.n:
        raise ConfigurationError("sample size does not match params.n")
    sum_z = int(round(float(z.sum())))
    obj = params.objective()
    cfg = GdConfig(eta=params.eta, steps=params.steps)
    traj = gd_run_empirical(obj, z.reshape(-1, 1), cfg)

    errs = np.empty(params.steps + 1)
    for t in range(params.steps + 1):
        w_ref = maxcoord_closed_form(params, sum_z, t)
        errs[t] = float(np.max(np.abs(traj.iterates[t] - w_ref)))
    max_err = float(errs.max())

    t_idx = np.arange(1, params.steps + 1)
    floors = NORM_FLOOR_COEF * params.eta * params.lipschitz * np.sqrt(t_idx - 1.0)
    norms = np.linalg.norm(traj.iterates[1:], axis=1)
    margins = norms - floors
    return MaxCoordCheck(
        matches=bool(max_err <= tol),
        lower_bound_holds=bool(np.all(margins >= 0.0)),
        max_abs_error=max_err,
        min_norm_margin=float(margins.min()),
    )


# ---------------------------------------------------------------------------
# origin-ball tradeoff instances (deterministic 1-d drifts)
# ---------------------------------------------------------------------------

ORIGIN_BALL_VARIANTS = ("drift", "scaled-drift")


@dataclass(frozen=True)
class OriginBallTerms:
    """The two competing report terms of one deterministic drift instance."""

    erm_gap: float
    norm_term: float


def origin_ball_terms(variant: str, lipschitz: float, n: int, eta: float, T: int) -> OriginBallTerms:
    """Closed-form (empirical suboptimality, norm-based term) of one instance.

    drift: f(w; z) = L*w.  The average iterate is -eta*L*(T+1)/2, so
      erm_gap  = L - eta*L^2*(T+1)/2        (vs the radius-1 ball minimum -L)
      norm_term = eta*L^2*(T+1)/(2*sqrt(n))  (|wbar| * L / sqrt(n))

    scaled-drift: f(w; z) = (L/n^{1/4})*w, same formulas with slope
    s = L/n^{1/4}:
      erm_gap  = L/n^{1/4} - eta*L^2*(T+1)/(2*sqrt(n))
      norm_term = eta*L^2*(T+1)/(2*n^{3/4})

    Both are exact algebra on the closed-form trajectory and are
    cross-checked against the engine in the test suite.
    """
    if variant not in ORIGIN_BALL_VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}")
    if n < 1 or T < 1 or not (eta > 0 and lipschitz > 0):
        raise ConfigurationError("need n >= 1, T >= 1, eta > 0, lipschitz > 0")
    L = lipschitz
    if variant == "drift":
        slope = L
    else:
        slope = L / n**0.25
    wbar = -eta * slope * (T + 1) / 2.0
    erm_gap = slope * wbar - (-slope)  # F(wbar) - min over the radius-1 ball
    norm_term = abs(wbar) * L / math.sqrt(n)
    return OriginBallTerms(erm_gap=float(erm_gap), norm_term=float(norm_term))


def origin_ball_instance(variant: str, lipschitz: float, n: int):
    """(objective, distribution) realizing an origin-ball drift on the engine."""
    if variant not in ORIGIN_BALL_VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}")
    slope = lipschitz if variant == "drift" else lipschitz / n**0.25
    obj = LinearObjective(lipschitz=slope, dim=1)
    dist = FiniteDistribution(atoms=np.array([[1.0]]), probs=np.array([1.0]))
    return obj, dist


@dataclass(frozen=True)
class OriginBallGridMin:
    value: float
    eta: float
    T: int


def origin_ball_grid_min(
    lipschitz: float, n: int, eta_grid, T_grid
) -> OriginBallGridMin:
    """min over the (eta, T) grid of the worst term over both drift instances.

    For every grid point the reported value is
    max(erm_gap, norm_term over both variants); the minimum over any grid is
    bounded below by L/(2*n^{1/4}) (the drift norm term and the scaled-drift
    erm gap sum to L/n^{1/4} exactly whenever the latter is nonnegative), and
    grid refinement can only lower the reported value toward that floor.
    """
    etas = [float(e) for e in eta_grid]
    Ts = [int(T) for T in T_grid]
    if not etas or not Ts:
        raise ConfigurationError("grids must be nonempty")
    best = None
    for T in Ts:
        for eta in etas:
            worst = -math.inf
            for variant in ORIGIN_BALL_VARIANTS:
                terms = origin_ball_terms(variant, lipschitz, n, eta, T)
                worst = max(worst, terms.erm_gap, terms.norm_term)
            if best is None or worst < best.value:
                best = OriginBallGridMin(value=worst, eta=eta, T=T)
    return best


def default_origin_ball_grids(lipschitz: float, n: int):
    """A small (eta, T) grid bracketing the optimal T ~ sqrt(n), eta ~ 1/(L*sqrt(T))."""
    root = math.sqrt(n)
    T_grid = sorted({max(1, int(round(c * root))) for c in (0.5, 1.0, 2.0, 4.0)})
    eta_grid = sorted(
        {
            s / (lipschitz * math.sqrt(T))
            for T in T_grid
            for s in (0.25, 0.5, 1.0, 2.0)
        }
    )
    return eta_grid, T_grid
