"""Flat key-value experiment configuration.

The config file is plain text, one ``key = value`` per line, ``#`` starts a
comment.  Unknown keys are hard errors: these experiments are adversarial
constructions whose conclusions silently break under misconfiguration, so a
typo must fail loudly rather than fall back to a default.

Documented keys (all optional unless a command states otherwise):

  experiment        informational; must match the subcommand when present
  preset            instance name (see presets module); "rademacher" is an
                    accepted alias for signed-drift (the +/-1 label law)
  atoms             inline distribution: rows separated by ';', numbers by ','
                    (each row is features...,label); mutually exclusive with
                    preset
  probs             atom probabilities, comma separated
  loss              hinge | linear | scaled-linear | absolute (inline atoms)
  loss_lipschitz    Lipschitz constant of the loss (default 1.0)
  loss_scale        slope factor for scaled-linear (default 1.0)
  clip_b, clip_c    clamp interval half-width and loss bound for clipping
  lipschitz         Lipschitz constant for non-GLM presets (default 1.0)
  n_list            sample sizes, comma separated
  n                 single sample size (commands that need exactly one)
  replicates        Monte-Carlo replicates (default 200)
  eta_rule          explicit | one-over-L-sqrtT (default one-over-L-sqrtT)
  eta               step size when eta_rule = explicit
  T_rule            explicit | equal-n | sqrt-n (default equal-n)
  T                 step count when T_rule = explicit
  delta             tail probability in (0, 1) (default 0.05)
  seed              base seed, unsigned 64-bit (default 0)
  B                 comparator ball radius (default 1.0)
  out               output directory (default "out")
  workers           worker processes (default 1; flag/env override)
  plots             true | false, render figures next to the CSVs (default true)
  oracle_budget     subgradient steps for the constrained oracle
  mc_replicates     sign draws for large-n gap probability estimates
  joint_n           sample size for the conditioned-trajectory check
  joint_T           step count for the conditioned-trajectory check
  joint_replicates  replicates for the joint-event frequency
  gtilde_n_list     sample sizes for the centered-ball comparison column
  gtilde_replicates replicates per centered-ball point
  hp_n_list         sample sizes for the quantile-vs-envelope experiment
  hp_replicates     replicates per quantile point
  input             CSV consumed by the rates command
  x_column          column with the abscissa (default "n")
  value_column      column with the fitted quantity (default "value")
  stderr_column     optional column with standard errors (inverse-variance
                    weights)
  expect_lo / expect_hi   inclusive exponent gate for the rates command
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .distributions import FiniteDistribution
from .engine import GdConfig
from .errors import ConfigurationError
from .generalization import ClipSpec
from .objectives import LOSS_KINDS, GlmObjective, ScalarLoss
from .presets import PRESET_NAMES, Preset, make_preset

_ETA_RULES = ("explicit", "one-over-L-sqrtT")
_T_RULES = ("explicit", "equal-n", "sqrt-n")
_PRESET_ALIASES = {"rademacher": "signed-drift"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str | None = None
    preset: str | None = None
    atoms: tuple[tuple[float, ...], ...] | None = None
    probs: tuple[float, ...] | None = None
    loss: str = "hinge"
    loss_lipschitz: float = 1.0
    loss_scale: float = 1.0
    clip_b: float | None = None
    clip_c: float | None = None
    lipschitz: float = 1.0
    n_list: tuple[int, ...] = ()
    n: int | None = None
    replicates: int = 200
    eta_rule: str = "one-over-L-sqrtT"
    eta: float | None = None
    T_rule: str = "equal-n"
    T: int | None = None
    delta: float = 0.05
    seed: int = 0
    B: float = 1.0
    out: str = "out"
    workers: int | None = None
    plots: bool = True
    oracle_budget: int = 200_000
    mc_replicates: int = 200_000
    joint_n: int = 32
    joint_T: int = 64
    joint_replicates: int = 2000
    gtilde_n_list: tuple[int, ...] = ()
    gtilde_replicates: int = 200
    hp_n_list: tuple[int, ...] = ()
    hp_replicates: int = 1000
    input: str | None = None
    x_column: str = "n"
    value_column: str = "value"
    stderr_column: str | None = None
    expect_lo: float | None = None
    expect_hi: float | None = None

    def __post_init__(self):
        for name in ("replicates", "mc_replicates", "joint_n", "joint_T",
                     "joint_replicates", "gtilde_replicates", "hp_replicates",
                     "oracle_budget"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError("delta must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if self.eta_rule not in _ETA_RULES:
            raise ConfigurationError(
                f"eta_rule must be one of {', '.join(_ETA_RULES)}"
            )
        if self.T_rule not in _T_RULES:
            raise ConfigurationError(f"T_rule must be one of {', '.join(_T_RULES)}")
        if self.eta_rule == "explicit" and (self.eta is None or not self.eta > 0):
            raise ConfigurationError("eta_rule = explicit requires eta > 0")
        if self.T_rule == "explicit" and (self.T is None or self.T < 1):
            raise ConfigurationError("T_rule = explicit requires T >= 1")
        if self.B <= 0:
            raise ConfigurationError("B must be > 0")
        if self.workers is not None and self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.preset is not None and self.atoms is not None:
            raise ConfigurationError("preset and atoms are mutually exclusive")
        if self.preset is not None:
            resolved = _PRESET_ALIASES.get(self.preset, self.preset)
            if resolved not in PRESET_NAMES:
                raise ConfigurationError(
                    f"unknown preset {self.preset!r}; expected one of "
                    f"{', '.join(PRESET_NAMES + tuple(_PRESET_ALIASES))}"
                )
        if (self.atoms is None) != (self.probs is None):
            raise ConfigurationError("atoms and probs must be given together")
        if self.loss not in LOSS_KINDS:
            raise ConfigurationError(f"loss must be one of {', '.join(LOSS_KINDS)}")
        for n in self.n_list + self.gtilde_n_list + self.hp_n_list:
            if n < 1:
                raise ConfigurationError("sample sizes must be >= 1")
        if self.n is not None and self.n < 1:
            raise ConfigurationError("n must be >= 1")

    # -- resolution helpers -------------------------------------------------

    def resolve_steps(self, n: int) -> int:
        if self.T_rule == "explicit":
            return int(self.T)
        if self.T_rule == "equal-n":
            return int(n)
        return max(1, round(math.sqrt(n)))

    def resolve_eta(self, lipschitz: float, steps: int) -> float:
        if self.eta_rule == "explicit":
            return float(self.eta)
        return 1.0 / (lipschitz * math.sqrt(steps))

    def schedule(self, lipschitz: float, n: int) -> GdConfig:
        steps = self.resolve_steps(n)
        return GdConfig(eta=self.resolve_eta(lipschitz, steps), steps=steps)

    def build_preset(self, n: int | None = None, steps: int | None = None) -> Preset:
        """Materialize the configured instance (named preset or inline atoms)."""
        if self.atoms is not None:
            loss = ScalarLoss(
                self.loss, lipschitz=self.loss_lipschitz, scale=self.loss_scale
            )
            atoms = np.array(self.atoms, dtype=float)
            if atoms.ndim != 2 or atoms.shape[1] < 2:
                raise ConfigurationError(
                    "inline atoms need at least one feature column plus a label"
                )
            dist = FiniteDistribution(atoms, np.array(self.probs, dtype=float))
            obj = GlmObjective(loss, dim=atoms.shape[1] - 1)
            clip = None
            if self.clip_b is not None and self.clip_c is not None:
                clip = ClipSpec(b=self.clip_b, c=self.clip_c)
            return Preset("inline", obj, dist, loss=loss, clip=clip)
        name = _PRESET_ALIASES.get(self.preset or "hinge", self.preset or "hinge")
        eta = None
        if steps is not None:
            eta = self.resolve_eta(self.lipschitz, steps)
        return make_preset(
            name, lipschitz=self.lipschitz, n=n, eta=eta, steps=steps
        )


_LIST_INT_KEYS = {"n_list", "gtilde_n_list", "hp_n_list"}
_INT_KEYS = {
    "n", "replicates", "T", "seed", "workers", "oracle_budget",
    "mc_replicates", "joint_n", "joint_T", "joint_replicates",
    "gtilde_replicates", "hp_replicates",
}
_FLOAT_KEYS = {
    "eta", "delta", "B", "lipschitz", "loss_lipschitz", "loss_scale",
    "clip_b", "clip_c", "expect_lo", "expect_hi",
}
_BOOL_KEYS = {"plots"}
_KNOWN_KEYS = {f.name for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str):
    try:
        if key in _LIST_INT_KEYS:
            return tuple(int(part) for part in raw.split(",") if part.strip())
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError(raw)
            return low == "true"
        if key == "atoms":
            return tuple(
                tuple(float(x) for x in row.split(","))
                for row in raw.split(";")
                if row.strip()
            )
        if key == "probs":
            return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigurationError(f"could not parse {key} = {raw!r}") from exc
    return raw


def parse_config_text(text: str) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw)
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:  # defensive; _KNOWN_KEYS should prevent this
        raise ConfigurationError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)
