"""Power-law exponent fitting by (weighted) least squares on log-log points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class RatePoints:
    """Positive (x, value) pairs, optionally with least-squares weights.

    Supply inverse-variance weights (1 / se_log^2, with se_log ~ stderr/value)
    when standard errors are available; unweighted fits pass weights=None.
    """

    x: np.ndarray
    value: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        value = np.asarray(self.value, dtype=float)
        if x.ndim != 1 or value.shape != x.shape:
            raise ConfigurationError("x and value must be 1-d arrays of equal length")
        if x.size < 3:
            raise ConfigurationError("need at least 3 points to fit a rate")
        if np.any(x <= 0) or np.any(value <= 0):
            raise ConfigurationError("rate fitting needs strictly positive x and value")
        w = self.weights
        if w is not None:
            w = np.asarray(w, dtype=float)
            if w.shape != x.shape or np.any(w <= 0):
                raise ConfigurationError("weights must be positive and match x")
            w = w.copy()
            w.flags.writeable = False
        for arr in (x, value):
            arr.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class PowerLawFit:
    """value ~ exp(intercept) * x**exponent with (weighted) R^2 in [0, 1]."""

    exponent: float
    intercept: float
    r_squared: float
    n_points: int


def fit_power_law(points: RatePoints) -> PowerLawFit:
    """Least-squares line through (log x, log value), optionally weighted.

    R^2 is the (weighted) coefficient of determination of the log-log
    residuals; an all-equal value vector fits exactly (R^2 = 1, exponent 0).
    """
    lx = np.log(points.x)
    ly = np.log(points.value)
    w = points.weights if points.weights is not None else np.ones_like(lx)
    sw = np.sqrt(w)
    design = np.stack([lx * sw, sw], axis=1)
    coef, *_ = np.linalg.lstsq(design, ly * sw, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = ly - (slope * lx + intercept)
    ss_res = float(w @ resid**2)
    mean_w = float(w @ ly) / float(w.sum())
    ss_tot = float(w @ (ly - mean_w) ** 2)
    if ss_tot <= 0.0:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return PowerLawFit(
        exponent=slope,
        intercept=intercept,
        r_squared=float(min(max(r2, 0.0), 1.0)),
        n_points=int(lx.size),
    )


def exponent_in(fit: PowerLawFit, lo: float, hi: float) -> bool:
    """Inclusive containment test for the fitted exponent."""
    if lo > hi:
        raise ConfigurationError("need lo <= hi")
    return bool(lo <= fit.exponent <= hi)
