"""
Semantic interference matrix.

Entries are the similarity of each unordered concept pair, queried once and
mirrored, with a zero diagonal.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from core.errors import ProviderTransportError, SimilarityUnavailableError
from core.types import Concept, clamp_unit
from logger import get_logger
from semantic.cache import SimilarityCache, cache_key
from semantic.providers import SimilarityProvider

logger = get_logger(__name__)


class ScoreSource(str, Enum):
    OFFLINE = "offline"
    LLM = "llm"
    CACHE = "cache"


class SimilarityScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0.0, le=1.0)
    provider_tag: ScoreSource


def similarity(
    a: Concept,
    b: Concept,
    provider: SimilarityProvider,
    cache: Optional[SimilarityCache] = None,
) -> SimilarityScore:
    """Similarity of a pair, served from the cache when the unordered pair is known.

    A concept is fully similar to itself without any provider call.

    Raises:
        SimilarityUnavailableError: when the provider transport fails after its retries.
    """
    source = ScoreSource(provider.tag.value)
    if a.id == b.id:
        return SimilarityScore(value=1.0, provider_tag=source)

    def compute() -> float:
        try:
            return provider.score(a, b)
        except ProviderTransportError as e:
            raise SimilarityUnavailableError((a.id, b.id), e) from e

    if cache is None:
        return SimilarityScore(value=compute(), provider_tag=source)

    key = cache_key(provider.tag.value, provider.model_id, a.id, b.id)
    value, from_cache = cache.get_or_compute(key, compute, provider.tag.value, provider.model_id)
    return SimilarityScore(value=value, provider_tag=ScoreSource.CACHE if from_cache else source)


@dataclass(frozen=True, eq=False)
class InterferenceMatrix:
    """Symmetric [0,1] matrix over an ordered list of concept ids, zero on the diagonal."""

    concept_ids: Tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        n = len(self.concept_ids)
        if entries.shape != (n, n):
            raise ValueError(f"entries must be {n}x{n}, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, '_index', {cid: i for i, cid in enumerate(self.concept_ids)})

    @property
    def size(self) -> int:
        return len(self.concept_ids)

    def index(self, concept_id: str) -> int:
        return self._index[concept_id]

    def violations(self) -> List[str]:
        """Invariant check: symmetric, zero diagonal, entries in [0,1]."""
        found = []
        if not np.all(np.diag(self.entries) == 0.0):
            found.append("non-zero diagonal")
        if not np.array_equal(self.entries, self.entries.T):
            found.append("not symmetric")
        if self.entries.size and (self.entries.min() < 0.0 or self.entries.max() > 1.0):
            found.append("entries outside [0,1]")
        return found

    def zeros_like(self) -> 'InterferenceMatrix':
        return InterferenceMatrix(self.concept_ids, np.zeros_like(self.entries))

    def top_pairs(self, k: int = 10) -> List[Tuple[str, str, float]]:
        """The k most confusable unordered pairs, highest first (ties by id)."""
        rows, cols = np.triu_indices(self.size, k=1)
        pairs = [(self.concept_ids[i], self.concept_ids[j], float(self.entries[i, j])) for i, j in zip(rows, cols)]
        pairs.sort(key=lambda p: (-p[2], p[0], p[1]))
        return pairs[:k]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.entries, index=list(self.concept_ids), columns=list(self.concept_ids))

    def to_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index_label="concept_id")


def build_matrix(
    concepts: Sequence[Concept],
    provider: SimilarityProvider,
    cache: Optional[SimilarityCache] = None,
    jobs: int = 1,
) -> InterferenceMatrix:
    """Assemble the interference matrix with n(n-1)/2 provider-or-cache lookups.

    Args:
        concepts: Concepts with distinct ids, in matrix order.
        provider: Similarity provider.
        cache: Optional persistent cache.
        jobs: Worker threads issuing lookups (the provider bounds its own concurrency).
    """
    ids = [c.id for c in concepts]
    if len(set(ids)) != len(ids):
        raise ValueError("build_matrix requires distinct concept ids")
    n = len(concepts)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    entries = np.zeros((n, n), dtype=float)
    total = len(pairs)
    step = max(1, total // 10)

    def lookup(pair: Tuple[int, int]) -> float:
        i, j = pair
        return similarity(concepts[i], concepts[j], provider, cache).value

    if jobs > 1 and total > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values: Iterable[float] = pool.map(lookup, pairs)
            values = list(values)
    else:
        values = []
        for done, pair in enumerate(pairs, start=1):
            values.append(lookup(pair))
            if done % step == 0:
                logger.info(f"Interference matrix: {done}/{total} pairs scored")

    for (i, j), value in zip(pairs, values):
        entries[i, j] = entries[j, i] = value
    return InterferenceMatrix(tuple(ids), entries)


def interference_pressure(matrix: InterferenceMatrix, target: int, active: Iterable[int]) -> float:
    """Mean interference between `target` and the active concepts (target itself ignored).

    Raises:
        IndexError: for indices outside the matrix.
    """
    n = matrix.size
    if not 0 <= target < n:
        raise IndexError(f"target index {target} outside matrix of size {n}")
    others = []
    for k in active:
        if not 0 <= k < n:
            raise IndexError(f"active index {k} outside matrix of size {n}")
        if k != target:
            others.append(k)
    if not others:
        return 0.0
    return clamp_unit(float(np.mean(matrix.entries[target, sorted(others)])))
