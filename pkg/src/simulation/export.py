"""Event log CSV export and the run manifest."""

import json
import subprocess
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

import pandas as pd

from core.types import ReviewEvent, SchedulerId, SimulationConfig
from simulation.runner import EventLog, config_hash

EVENT_COLUMNS = ["day", "learner_id", "concept_id", "scheduler", "interval", "predicted_recall", "success"]


def events_frame(log: EventLog) -> pd.DataFrame:
    rows = [
        {
            "day": e.day,
            "learner_id": e.learner_id,
            "concept_id": e.concept_id,
            "scheduler": e.scheduler_id.value,
            "interval": e.scheduled_interval,
            "predicted_recall": e.predicted_recall,
            "success": int(e.success),
        }
        for e in log.events
    ]
    return pd.DataFrame(rows, columns=EVENT_COLUMNS)


def write_events_csv(log: EventLog, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    events_frame(log).to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
    return path


def read_events_csv(path: Union[str, Path], label: str = "", digest: str = "") -> EventLog:
    """Load an exported log; floats parse back to the exact values written."""
    frame = pd.read_csv(path, dtype={"concept_id": str, "scheduler": str}, float_precision="round_trip")
    events = tuple(
        ReviewEvent(
            learner_id=int(row.learner_id),
            concept_id=row.concept_id,
            day=int(row.day),
            scheduled_interval=float(row.interval),
            success=bool(row.success),
            predicted_recall=float(row.predicted_recall),
            scheduler_id=SchedulerId(row.scheduler),
        )
        for row in frame.itertuples(index=False)
    )
    return EventLog(events, digest, label)


def git_describe() -> str:
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5, check=False,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return result.stdout.strip() or "unknown"


def build_manifest(cfg: SimulationConfig, scheduler: str) -> dict:
    return {
        "config": cfg.model_dump(mode='json'),
        "seed": cfg.seed,
        "scheduler": scheduler,
        "git_describe": git_describe(),
        "config_hash": config_hash(cfg),
        "created_at": datetime.now(timezone.utc).isoformat(),
    }


def write_manifest(cfg: SimulationConfig, scheduler: str, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(build_manifest(cfg, scheduler), file, indent=2)
    return path
