"""SVG bar charts of the comparison table, one per metric plus a four-panel overview."""

from pathlib import Path
from typing import Dict, List, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

METRIC_LABELS = {
    "success_rate": "Success Rate",
    "efficiency_score": "Efficiency Score",
    "avg_interval": "Average Interval (days)",
    "total_attempts": "Learning Burden (reviews)",
}

# fixed salt keeps element ids, and so the files, identical across runs
plt.rcParams["svg.hashsalt"] = "lector"

SVG_METADATA = {"Date": None}


def _bar(ax, table: pd.DataFrame, metric: str) -> None:
    ax.bar(table["algorithm"], table[metric], color="steelblue")
    ax.set_title(METRIC_LABELS[metric])
    ax.tick_params(axis="x", rotation=45)
    ax.grid(axis="y", alpha=0.3)


def plot_metric(table: pd.DataFrame, metric: str, path: Union[str, Path]) -> Path:
    if metric not in METRIC_LABELS:
        raise ValueError(f"Unknown metric '{metric}'")
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    _bar(ax, table, metric)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def plot_comparison(table: pd.DataFrame, output_dir: Union[str, Path]) -> List[Path]:
    """Write one SVG per metric and the overview; returns the written paths."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = [plot_metric(table, metric, output_dir / f"{metric}.svg") for metric in METRIC_LABELS]

    fig, axes = plt.subplots(2, 2, figsize=(12, 8))
    for ax, metric in zip(axes.flat, METRIC_LABELS):
        _bar(ax, table, metric)
    fig.tight_layout()
    overview = output_dir / "overview.svg"
    fig.savefig(overview, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    written.append(overview)
    return written


def plot_medians(medians: Dict[str, float], path: Union[str, Path]) -> Path:
    frame = pd.DataFrame(
        sorted(medians.items(), key=lambda item: -item[1]), columns=["algorithm", "success_rate"]
    )
    return plot_metric(frame, "success_rate", path)


def plot_improvement(analysis: pd.DataFrame, reference: str, path: Union[str, Path]) -> Path:
    """Percentage-point gap of `reference` over each other scheduler; negative bars mean it trailed."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    colors = ["seagreen" if gap >= 0 else "indianred" for gap in analysis["percentage_point_gap"]]
    ax.bar(analysis["algorithm"], analysis["percentage_point_gap"], color=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_title(f"{reference} Success Rate Gap (pp)")
    ax.tick_params(axis="x", rotation=45)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path
