"""Figure rendering for experiment reports.

Every plotting function takes already-computed summaries and writes one PNG;
nothing here recomputes statistics, so figures always agree with the CSVs
emitted next to them.  The Agg backend keeps rendering headless-safe.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .generalization import ClippedQuantileSummary, ExcessRateCurve
from .proximity import ProximitySummary
from .ratefit import PowerLawFit, RatePoints


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_proximity(summaries: list[ProximitySummary], path: str) -> None:
    """Mean trajectory distance vs t against both envelopes, one panel per n."""
    k = len(summaries)
    fig, axes = plt.subplots(1, k, figsize=(4.2 * k, 3.4), squeeze=False)
    for ax, s in zip(axes[0], summaries):
        t = np.arange(s.steps + 1)
        ax.plot(t, s.mean, label="mean distance", color="tab:blue")
        ax.fill_between(
            t,
            s.mean - 2 * s.mean_stderr,
            s.mean + 2 * s.mean_stderr,
            color="tab:blue",
            alpha=0.2,
            linewidth=0,
        )
        ax.plot(t, s.q90, label="q90", color="tab:cyan", ls=":")
        ax.plot(t, s.bound_expectation, label="expectation envelope",
                color="tab:orange", ls="--")
        ax.plot(t, s.bound_highprob, label="high-prob envelope",
                color="tab:red", ls="-.")
        ax.set_title(f"n = {s.n}")
        ax.set_xlabel("step t")
        ax.set_ylabel("||w_t(sample) - w_t(population)||")
    axes[0][0].legend(fontsize=8)
    _finish(fig, path)


def plot_gap_probabilities(ns, probs, stderrs, path: str) -> None:
    """Two-sample mean-gap probability vs n with the 0.1 acceptance line."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ns = np.asarray(ns, dtype=float)
    probs = np.asarray(probs, dtype=float)
    stderrs = np.asarray(stderrs, dtype=float)
    ax.errorbar(ns, probs, yerr=3 * stderrs, fmt="o-", capsize=3,
                label="P(gap >= 1/sqrt(n))")
    ax.axhline(0.1, color="tab:red", ls="--", label="0.1 floor")
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("probability")
    ax.set_ylim(0.0, 1.0)
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_norm_floor(norms: np.ndarray, floor: np.ndarray, path: str) -> None:
    """Conditioned trajectory norms vs the lower envelope."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    t = np.arange(norms.shape[-1])
    if norms.ndim == 2:
        for row in norms:
            ax.plot(t, row, color="tab:blue", alpha=0.25, lw=0.8)
        ax.plot([], [], color="tab:blue", label="conditioned ||w_t||")
    else:
        ax.plot(t, norms, color="tab:blue", label="conditioned ||w_t||")
    ax.plot(t, floor, color="tab:red", ls="--", label="norm floor")
    ax.set_xlabel("step t")
    ax.set_ylabel("||w_t||")
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_loglog_fit(points: RatePoints, fit: PowerLawFit, path: str,
                    xlabel: str = "n", ylabel: str = "value",
                    extra: tuple[RatePoints, PowerLawFit, str] | None = None) -> None:
    """Log-log scatter with the fitted power law (optionally a second series)."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))

    def draw(pts: RatePoints, f: PowerLawFit, color: str, label: str) -> None:
        ax.loglog(pts.x, pts.value, "o", color=color, label=label)
        grid = np.geomspace(pts.x.min(), pts.x.max(), 64)
        ax.loglog(grid, np.exp(f.intercept) * grid**f.exponent, "--", color=color,
                  label=f"slope {f.exponent:+.3f} (R^2 {f.r_squared:.3f})")

    draw(points, fit, "tab:blue", ylabel)
    if extra is not None:
        pts2, fit2, label2 = extra
        draw(pts2, fit2, "tab:green", label2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_excess_rate(curve: ExcessRateCurve, fit: PowerLawFit, path: str) -> None:
    """Mean excess population risk vs n on log-log axes with the fitted slope."""
    ns = np.array([p.n for p in curve.points], dtype=float)
    vals = np.array([p.mean_excess for p in curve.points])
    errs = np.array([p.stderr for p in curve.points])
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.errorbar(ns, vals, yerr=2 * errs, fmt="o", capsize=3, color="tab:blue",
                label="mean excess risk")
    grid = np.geomspace(ns.min(), ns.max(), 64)
    ax.plot(grid, np.exp(fit.intercept) * grid**fit.exponent, "--",
            color="tab:orange",
            label=f"slope {fit.exponent:+.3f} (R^2 {fit.r_squared:.3f})")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("excess population risk")
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_quantiles(summaries: list[ClippedQuantileSummary], path: str) -> None:
    """Clipped excess-risk spread per n; quantile markers vs the envelope."""
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    positions = np.arange(len(summaries), dtype=float)
    data = [s.excess_clipped for s in summaries]
    ax.violinplot(data, positions=positions, widths=0.7, showextrema=False)
    for i, s in enumerate(summaries):
        for row in s.rows:
            ax.plot(i, row.quantile_clipped, "v", color="tab:blue",
                    label=f"q(1-{row.delta:g})" if i == 0 else None)
            ax.plot(i, row.bound_excess, "_", color="tab:red", markersize=18,
                    label=f"envelope (delta={row.delta:g})" if i == 0 else None)
    ax.set_xticks(positions)
    ax.set_xticklabels([f"n={s.n}" for s in summaries])
    ax.set_ylabel("clipped excess risk")
    ax.legend(fontsize=8)
    _finish(fig, path)
