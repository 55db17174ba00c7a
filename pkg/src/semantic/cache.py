"""
Persistent similarity cache.

One JSON object per line: {"key", "value", "provider_tag", "model"}. The file
is append-only; concurrent readers share an in-memory index while writes are
serialized. A pair missing from the cache triggers at most one provider call
even when several workers ask for it at the same time.
"""

import json
import threading
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

from core.errors import ConfigurationError
from logger import get_logger

logger = get_logger(__name__)


def cache_key(provider_id: str, model_id: str, first_id: str, second_id: str) -> str:
    """Key of an unordered concept pair for a given provider and model."""
    lo, hi = sorted((first_id, second_id))
    return f"{provider_id}|{model_id}|{lo}|{hi}"


@dataclass
class CacheStats:
    """Entry count plus the hit/miss counters of a run."""
    entries: int
    hits: int
    misses: int

    def to_dict(self) -> dict:
        return asdict(self)


class SimilarityCache:
    """Append-only JSON-lines cache of similarity scores."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._entries: Dict[str, float] = {}
        self._inflight: Dict[str, threading.Event] = {}
        self._lock = threading.Lock()
        self._write_lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self._load()

    @property
    def stats_path(self) -> Path:
        return self.path.with_name(self.path.name + ".stats.json")

    def _load(self) -> None:
        if not self.path.exists():
            return
        try:
            with open(self.path, 'r', encoding='utf-8') as file:
                for line_no, line in enumerate(file, start=1):
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    self._entries[record["key"]] = float(record["value"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ConfigurationError(f"Unreadable similarity cache {self.path}: {e}") from e
        logger.info(f"Loaded {len(self._entries)} cached similarities from {self.path}")

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def get(self, key: str) -> Optional[float]:
        return self._entries.get(key)

    def _append(self, key: str, value: float, provider_tag: str, model: str) -> None:
        record = {"key": key, "value": value, "provider_tag": provider_tag, "model": model}
        with self._write_lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, 'a', encoding='utf-8') as file:
                file.write(json.dumps(record) + "\n")

    def get_or_compute(
        self,
        key: str,
        compute: Callable[[], float],
        provider_tag: str,
        model: str,
    ) -> Tuple[float, bool]:
        """Return (value, from_cache); `compute` runs at most once per missing key."""
        while True:
            with self._lock:
                if key in self._entries:
                    self.hits += 1
                    return self._entries[key], True
                pending = self._inflight.get(key)
                if pending is None:
                    pending = threading.Event()
                    self._inflight[key] = pending
                    owner = True
                else:
                    owner = False

            if not owner:
                pending.wait()
                # the owner either stored the value or failed; re-check
                continue

            try:
                value = compute()
                self._append(key, value, provider_tag, model)
                with self._lock:
                    self._entries[key] = value
                    self.misses += 1
                return value, False
            finally:
                with self._lock:
                    del self._inflight[key]
                pending.set()

    def stats(self) -> CacheStats:
        return CacheStats(entries=len(self._entries), hits=self.hits, misses=self.misses)

    def save_stats(self) -> None:
        """Record this run's counters next to the cache file."""
        self.stats_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.stats_path, 'w', encoding='utf-8') as file:
            json.dump(self.stats().to_dict(), file)

    def last_run_stats(self) -> CacheStats:
        """Entry count now, hit/miss counters as recorded by the last run."""
        hits = misses = 0
        if self.stats_path.exists():
            try:
                with open(self.stats_path, 'r', encoding='utf-8') as file:
                    recorded = json.load(file)
                hits, misses = int(recorded.get("hits", 0)), int(recorded.get("misses", 0))
            except (OSError, json.JSONDecodeError, ValueError) as e:
                raise ConfigurationError(f"Unreadable cache stats {self.stats_path}: {e}") from e
        return CacheStats(entries=len(self._entries), hits=hits, misses=misses)

    def clear(self) -> None:
        """Truncate the cache file and reset the counters."""
        with self._write_lock, self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("", encoding='utf-8')
            if self.stats_path.exists():
                self.stats_path.unlink()
            self._entries.clear()
            self.hits = 0
            self.misses = 0
        logger.info(f"Cleared similarity cache {self.path}")
