"""gdtraj: subgradient-descent trajectory experiments on finite-support data.

The library runs unprojected subgradient descent on convex instances with
exactly computable population behavior, measures how far sampled
trajectories wander from the population path, realizes the constructions
that make them wander as far as possible, and turns both into generalization
reports with explicit envelopes.  The CLI (``gdtraj``) orchestrates the
experiments and writes CSVs, figures, and a checksum manifest.
"""

from .config import ExperimentConfig, load_config, parse_config_text
from .constructions import (
    EXACT_GAP_MAX_N,
    JOINT_EVENT_FLOOR,
    NORM_FLOOR_COEF,
    ORIGIN_BALL_VARIANTS,
    EventOdds,
    MaxCoordCheck,
    MaxCoordParams,
    OriginBallGridMin,
    OriginBallTerms,
    default_origin_ball_grids,
    gap_probability_exact,
    gap_probability_mc,
    linear_drift_iterate,
    maxcoord_closed_form,
    maxcoord_event_probability,
    maxcoord_trajectory_check,
    origin_ball_grid_min,
    origin_ball_instance,
    origin_ball_terms,
    signed_drift_instance,
)
from .distributions import (
    FiniteDistribution,
    SampleSet,
    auxiliary_rng,
    empirical_risk,
    mix64,
    population_risk,
    population_subgrad,
    replicate_rng,
    sample,
)
from .engine import (
    AVERAGING_SCHEMES,
    GdConfig,
    LeanRun,
    OracleResult,
    Trajectory,
    average_iterate,
    constrained_erm_oracle,
    gd_run_empirical,
    gd_run_empirical_lean,
    gd_run_population,
    gd_run_population_lean,
    trajectory_to_csv,
)
from .errors import (
    ConfigurationError,
    DimensionMismatch,
    InvariantFailure,
    NumericFault,
)
from .generalization import (
    BallComplexity,
    ClippedQuantileSummary,
    ClipSpec,
    ExcessRateCurve,
    ExcessRatePoint,
    HpBound,
    QuantileRow,
    ShiftedBall,
    clip,
    clipped_population_risk,
    clipped_risk_quantiles,
    excess_population_risk,
    excess_risk_curve,
    hp_bound,
    rademacher_glm_ball,
    rademacher_linear,
    validate_clip_compatibility,
)
from .objectives import (
    LOSS_KINDS,
    GlmObjective,
    LinearObjective,
    MaxCoordObjective,
    Objective,
    ScalarLoss,
    glm_instance,
    loss_subgrad,
    loss_value,
)
from .presets import PRESET_NAMES, Preset, hinge_instance, make_preset
from .proximity import (
    CenteredTerms,
    ProximitySummary,
    StabilitySummary,
    bassily_reference,
    centered_terms,
    proximity_bound_expectation,
    proximity_bound_highprob,
    proximity_bound_highprob_single,
    proximity_experiment,
    stability_experiment,
    trajectory_distance,
)
from .ratefit import PowerLawFit, RatePoints, exponent_in, fit_power_law

__version__ = "0.1.0"

__all__ = [
    "AVERAGING_SCHEMES",
    "BallComplexity",
    "CenteredTerms",
    "ClipSpec",
    "ClippedQuantileSummary",
    "ConfigurationError",
    "DimensionMismatch",
    "EXACT_GAP_MAX_N",
    "EventOdds",
    "ExcessRateCurve",
    "ExcessRatePoint",
    "ExperimentConfig",
    "FiniteDistribution",
    "GdConfig",
    "GlmObjective",
    "HpBound",
    "InvariantFailure",
    "JOINT_EVENT_FLOOR",
    "LOSS_KINDS",
    "LeanRun",
    "LinearObjective",
    "MaxCoordCheck",
    "MaxCoordObjective",
    "MaxCoordParams",
    "NORM_FLOOR_COEF",
    "NumericFault",
    "ORIGIN_BALL_VARIANTS",
    "Objective",
    "OracleResult",
    "OriginBallGridMin",
    "OriginBallTerms",
    "PRESET_NAMES",
    "PowerLawFit",
    "Preset",
    "ProximitySummary",
    "QuantileRow",
    "RatePoints",
    "SampleSet",
    "ScalarLoss",
    "ShiftedBall",
    "StabilitySummary",
    "Trajectory",
    "auxiliary_rng",
    "average_iterate",
    "bassily_reference",
    "centered_terms",
    "clip",
    "clipped_population_risk",
    "clipped_risk_quantiles",
    "constrained_erm_oracle",
    "default_origin_ball_grids",
    "empirical_risk",
    "excess_population_risk",
    "excess_risk_curve",
    "exponent_in",
    "fit_power_law",
    "gap_probability_exact",
    "gap_probability_mc",
    "gd_run_empirical",
    "gd_run_empirical_lean",
    "gd_run_population",
    "gd_run_population_lean",
    "glm_instance",
    "hinge_instance",
    "hp_bound",
    "linear_drift_iterate",
    "load_config",
    "loss_subgrad",
    "loss_value",
    "make_preset",
    "maxcoord_closed_form",
    "maxcoord_event_probability",
    "maxcoord_trajectory_check",
    "mix64",
    "origin_ball_grid_min",
    "origin_ball_instance",
    "origin_ball_terms",
    "parse_config_text",
    "population_risk",
    "population_subgrad",
    "proximity_bound_expectation",
    "proximity_bound_highprob",
    "proximity_bound_highprob_single",
    "proximity_experiment",
    "rademacher_glm_ball",
    "rademacher_linear",
    "replicate_rng",
    "sample",
    "signed_drift_instance",
    "stability_experiment",
    "trajectory_distance",
    "trajectory_to_csv",
    "validate_clip_compatibility",
]
