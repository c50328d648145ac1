"""Figures and gnuplot data files rendered from the CSV outputs.

matplotlib is imported on first use only; nothing else in the package needs it.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ZOSimplexError
from .experiment import GROUP_KEYS, RateFit, rate_fit


def _label(key) -> str:
    return " ".join(str(k) for k in key)


def write_gnuplot(rows, path, metric: str = "avg_gap", group_keys=GROUP_KEYS) -> Path:
    """Seed-averaged ``metric`` per horizon, one gnuplot data block per group.

    Blocks are separated by two blank lines so ``index N`` selects a group.
    Columns: T, mean, standard error over seeds, number of seeds.
    """
    groups: dict[tuple, dict[int, list[float]]] = {}
    for r in rows:
        if r.get(metric) is None:
            continue
        key = tuple(r[k] for k in group_keys)
        groups.setdefault(key, {}).setdefault(int(r["T"]), []).append(float(r[metric]))
    lines = []
    for key in sorted(groups, key=str):
        lines.append(f"# {_label(key)}")
        lines.append(f"# T mean_{metric} stderr n")
        for T in sorted(groups[key]):
            v = np.asarray(groups[key][T])
            se = v.std(ddof=1) / np.sqrt(v.size) if v.size > 1 else 0.0
            lines.append(f"{T} {float(v.mean())!r} {float(se)!r} {v.size}")
        lines.extend(["", ""])
    path = Path(path)
    path.write_text("\n".join(lines))
    return path


def plot_rates(fits: dict[tuple, RateFit], path, metric: str = "avg_gap") -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for key, fit in fits.items():
        T = np.asarray(fit.horizons, dtype=float)
        (line,) = ax.loglog(T, fit.means, "o", label=f"{_label(key)}: slope {fit.slope:.3f}")
        ax.loglog(T, np.exp(fit.intercept) * T**fit.slope, "--", color=line.get_color())
    if fits:
        first = next(iter(fits.values()))
        T = np.asarray(first.horizons, dtype=float)
        ax.loglog(T, first.means[0] * (T / T[0]) ** -0.25, "k:", label="$T^{-1/4}$ reference")
    ax.set_xlabel("horizon $T$")
    ax.set_ylabel(metric.replace("_", " "))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_bias(rows, path) -> Path:
    """Measured bias against its bound, one marker per grid cell."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for oid in sorted({r["objective_id"] for r in rows}):
        sel = [r for r in rows if r["objective_id"] == oid]
        bound = np.array([r["bound"] for r in sel])
        bias = np.array([r["bias_norm"] for r in sel])
        se = np.array([r["std_err"] for r in sel])
        ax.errorbar(bound, bias, yerr=3 * se, fmt="o", ms=4, capsize=2, label=oid)
    hi = max([r["bound"] for r in rows] + [r["bias_norm"] + 3 * r["std_err"] for r in rows])
    ax.plot([0, hi], [0, hi], "k--", lw=1, label="bias = bound")
    ax.set_xlabel(r"bound $2\beta\delta$")
    ax.set_ylabel("measured bias norm")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_run_report(rows, stem, metric: str = "avg_gap") -> list[Path]:
    """``<stem>.dat`` plus ``<stem>.png`` next to a summary CSV."""
    stem = Path(stem)
    out = [write_gnuplot(rows, stem.with_suffix(".dat"), metric)]
    usable = [r for r in rows if r.get(metric) is not None]
    try:
        fits = rate_fit(usable, metric=metric)
    except ZOSimplexError:
        fits = {}
    if fits:
        out.append(plot_rates(fits, stem.with_suffix(".png"), metric))
    return out
