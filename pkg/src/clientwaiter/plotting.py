"""Self-contained SVG charts for experiment rows (one chart per file)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _num(x):
    try:
        return float(x)
    except (TypeError, ValueError):
        return None


def _finish(fig, ax, path: str | Path, legend: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ax.text(
        0.01, 0.99, legend, transform=ax.transAxes, va="top", ha="left", fontsize=7, family="monospace",
        bbox=dict(boxstyle="round", fc="white", alpha=0.8),
    )
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_bias_curve(rows: list[dict], path: str | Path, legend: str = "") -> Path:
    """Measured statistic against q, one line per (n, client), bounds dashed."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    series: dict[tuple, list] = {}
    for r in rows:
        series.setdefault((r["n"], r["client"]), []).append(r)
    for (n, client), rs in sorted(series.items(), key=lambda kv: str(kv[0])):
        rs = sorted(rs, key=lambda r: float(r["q"]))
        qs = [float(r["q"]) for r in rs]
        ax.plot(qs, [float(r["value"]) for r in rs], marker="o", label=f"n={n} {client}")
        bq = [(float(r["q"]), _num(r["bound"])) for r in rs if _num(r["bound"]) is not None]
        if bq:
            ax.plot(*zip(*bq), linestyle="--", color="grey", label=f"bound n={n}")
    ax.set_xscale("log")
    ax.set_xlabel("bias q")
    ax.set_ylabel(rows[0]["statistic"] if rows else "")
    return _finish(fig, ax, path, legend)


def plot_threshold(rows: list[dict], path: str | Path, legend: str = "") -> Path:
    """Client win rate against the scaled edge probability, with Wilson bars."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    series: dict[tuple, list] = {}
    for r in rows:
        series.setdefault((r["n"], r["q"]), []).append(r)
    for (n, q), rs in sorted(series.items(), key=lambda kv: str(kv[0])):
        rs = [r for r in rs if _num(r["value"]) is not None]
        rs.sort(key=lambda r: float(r["c"]))
        if not rs:
            continue
        xs = [float(r["c"]) for r in rs]
        ys = [float(r["value"]) for r in rs]
        lo = [y - float(r["ci_low"]) for y, r in zip(ys, rs)]
        hi = [float(r["ci_high"]) - y for y, r in zip(ys, rs)]
        ax.errorbar(xs, ys, yerr=[lo, hi], marker="o", capsize=3, label=f"n={n} q={q}")
    ax.set_xscale("log")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("p * n^(1/m2(H))")
    ax.set_ylabel("Client win rate")
    return _finish(fig, ax, path, legend)


def plot_hitting_histogram(diffs: list[int], path: str | Path, legend: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if diffs:
        lo, hi = min(diffs), max(diffs)
        ax.hist(diffs, bins=range(lo, hi + 2), align="left", label="tau_client - tau_K5-e")
    ax.set_xlabel("difference of hitting times (edges)")
    ax.set_ylabel("runs")
    return _finish(fig, ax, path, legend)
