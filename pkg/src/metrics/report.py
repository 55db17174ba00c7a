"""
Evaluation metrics and the cross-scheduler comparison table.

Efficiency is kappa * success_rate * avg_interval with kappa = 0.8.
"""

import json
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import Field

from core.errors import UndefinedMetricError
from core.types import FrozenModel
from simulation.runner import EventLog

KAPPA = 0.8

TABLE_COLUMNS = ["algorithm", "success_rate", "efficiency_score", "avg_interval", "total_attempts"]


class SchedulerReport(FrozenModel):
    """The four metrics of one run; `scheduler_id` is the run label."""
    scheduler_id: str
    success_rate: float = Field(..., ge=0.0, le=1.0)
    efficiency_score: float = Field(..., ge=0.0)
    avg_interval: float = Field(..., ge=0.0)
    total_attempts: int = Field(..., ge=0)


def _require_events(log: EventLog, metric: str) -> None:
    if not log.events:
        raise UndefinedMetricError(f"{metric} is undefined for an empty event log")


def success_rate(log: EventLog) -> float:
    _require_events(log, "success_rate")
    return sum(1 for e in log.events if e.success) / len(log.events)


def avg_interval(log: EventLog) -> float:
    _require_events(log, "avg_interval")
    return float(np.mean([e.scheduled_interval for e in log.events]))


def efficiency_score(success: float, interval: float, kappa: float = KAPPA) -> float:
    if success < 0 or interval < 0:
        raise ValueError("efficiency_score needs non-negative inputs")
    return kappa * success * interval


def learning_burden(log: EventLog) -> int:
    return len(log.events)


def summarize(log: EventLog, scheduler_id: Optional[str] = None, kappa: float = KAPPA) -> SchedulerReport:
    """All four metrics of a log, labelled with `scheduler_id` or the log's own label."""
    sr = success_rate(log)
    ai = avg_interval(log)
    return SchedulerReport(
        scheduler_id=scheduler_id or log.label,
        success_rate=sr,
        efficiency_score=efficiency_score(sr, ai, kappa),
        avg_interval=ai,
        total_attempts=learning_burden(log),
    )


def _check_unique(reports: Sequence[SchedulerReport]) -> None:
    ids = [r.scheduler_id for r in reports]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        raise ValueError(f"Duplicate scheduler ids in reports: {duplicates}")


def comparison_table(reports: Sequence[SchedulerReport]) -> pd.DataFrame:
    """Reports ranked by success rate, ties broken by efficiency.

    The first row carries the leader's improvement over the runner-up, both as a
    relative fraction ((first - second) / second) and in percentage points.
    """
    if not reports:
        raise ValueError("comparison_table needs at least one report")
    _check_unique(reports)

    table = pd.DataFrame([
        {
            "algorithm": r.scheduler_id,
            "success_rate": r.success_rate,
            "efficiency_score": r.efficiency_score,
            "avg_interval": r.avg_interval,
            "total_attempts": r.total_attempts,
        }
        for r in reports
    ], columns=TABLE_COLUMNS)
    table = table.sort_values(
        ["success_rate", "efficiency_score"], ascending=False, kind="mergesort"
    ).reset_index(drop=True)

    table["relative_improvement"] = np.nan
    table["percentage_point_gap"] = np.nan
    if len(table) > 1:
        first, second = table.loc[0, "success_rate"], table.loc[1, "success_rate"]
        if second > 0:
            table.loc[0, "relative_improvement"] = (first - second) / second
        table.loc[0, "percentage_point_gap"] = (first - second) * 100.0
    return table


def improvement_analysis(reports: Sequence[SchedulerReport], reference: str = "lector") -> pd.DataFrame:
    """Success-rate improvement of `reference` over every other scheduler."""
    _check_unique(reports)
    by_id = {r.scheduler_id: r for r in reports}
    if reference not in by_id:
        raise ValueError(f"Reference scheduler '{reference}' not among the reports")
    base = by_id[reference].success_rate
    rows = []
    for r in reports:
        if r.scheduler_id == reference:
            continue
        rows.append({
            "algorithm": r.scheduler_id,
            "success_rate": r.success_rate,
            "relative_improvement": (base - r.success_rate) / r.success_rate if r.success_rate > 0 else math.nan,
            "percentage_point_gap": (base - r.success_rate) * 100.0,
        })
    frame = pd.DataFrame(rows, columns=["algorithm", "success_rate", "relative_improvement", "percentage_point_gap"])
    return frame.sort_values("relative_improvement", ascending=False, kind="mergesort").reset_index(drop=True)


def median_success_rates(per_seed: Iterable[Sequence[SchedulerReport]]) -> Dict[str, float]:
    """Median success rate of each scheduler across seeds."""
    frame = pd.DataFrame([
        {"algorithm": r.scheduler_id, "success_rate": r.success_rate}
        for reports in per_seed for r in reports
    ])
    if frame.empty:
        raise UndefinedMetricError("median_success_rates needs at least one report")
    medians = frame.groupby("algorithm")["success_rate"].median()
    return {name: float(value) for name, value in medians.items()}


def tiers(medians: Dict[str, float], min_gap: float = 0.03) -> List[List[str]]:
    """Split schedulers, best first, wherever consecutive success rates drop by more than `min_gap`."""
    ranked = sorted(medians.items(), key=lambda item: (-item[1], item[0]))
    groups: List[List[str]] = []
    previous = None
    for name, rate in ranked:
        if previous is None or previous - rate > min_gap:
            groups.append([])
        groups[-1].append(name)
        previous = rate
    return groups


def write_reports_json(reports: Sequence[SchedulerReport], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as file:
        json.dump([r.model_dump() for r in reports], file, indent=2)
    return path


def write_table_csv(table: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
    return path
