"""
Domain types shared by every module.

All types are frozen pydantic models: immutable once built, safe to hand to
worker processes, and serialized to JSON with their snake_case field names.
"""

import json
import math
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import ConfigurationError, NonFiniteValueError


class SchedulerId(str, Enum):
    """The seven scheduling algorithms."""
    LECTOR = "lector"
    SM2 = "sm2"
    HLR = "hlr"
    FSRS = "fsrs-simplified"
    ANKI = "anki"
    THRESHOLD = "threshold"
    SSPMMC = "sspmmc-simplified"


class ProviderKind(str, Enum):
    """Similarity providers selectable from the CLI and experiment files."""
    OFFLINE = "offline"
    LLM = "llm"


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


def clamp_unit(x: float) -> float:
    """Clamp a finite real into [0, 1].

    Raises:
        NonFiniteValueError: if x is NaN or infinite.
    """
    if not math.isfinite(x):
        raise NonFiniteValueError(f"Non-finite value {x!r} where a [0,1] quantity was expected")
    return min(1.0, max(0.0, float(x)))


# ============================================================================
# Concept pool
# ============================================================================

class Concept(FrozenModel):
    """A vocabulary item of the concept pool."""
    id: str
    term: str
    gloss: str
    group_id: str
    difficulty: float = Field(..., ge=0.0, le=1.0)


class SemanticGroup(FrozenModel):
    """A group of internally similar concepts."""
    group_id: str
    members: Tuple[str, ...]
    base_similarity: float = Field(..., ge=0.0, le=1.0)

    @field_validator('members')
    @classmethod
    def _members_unique(cls, members: Tuple[str, ...]) -> Tuple[str, ...]:
        if not members:
            raise ValueError("members must be non-empty")
        if len(set(members)) != len(members):
            raise ValueError("members must not contain duplicates")
        return members


def check_pool(concepts: List[Concept], groups: List[SemanticGroup]) -> None:
    """Check id uniqueness and group references of a pool.

    Raises:
        ConfigurationError: on duplicate ids or dangling group references.
    """
    ids = [c.id for c in concepts]
    if len(set(ids)) != len(ids):
        raise ConfigurationError("Concept ids must be unique within a pool")
    group_ids = {g.group_id for g in groups}
    dangling = sorted({c.group_id for c in concepts} - group_ids)
    if dangling:
        raise ConfigurationError(f"Concepts reference unknown groups: {dangling[:10]}")


def load_concept_pool(path: Union[str, Path]) -> Tuple[List[Concept], List[SemanticGroup]]:
    """Load a concept pool from its JSON file.

    Format: {"groups": [{"group_id", "base_similarity", "members": [{"id","term","gloss","difficulty"}]}]}
    """
    try:
        with open(path, 'r', encoding='utf-8') as file:
            payload = json.load(file)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read concept pool {path}: {e}") from e

    concepts: List[Concept] = []
    groups: List[SemanticGroup] = []
    try:
        for raw_group in payload["groups"]:
            members = []
            for raw in raw_group["members"]:
                concept = Concept(group_id=raw_group["group_id"], **raw)
                concepts.append(concept)
                members.append(concept.id)
            groups.append(SemanticGroup(
                group_id=raw_group["group_id"],
                members=tuple(members),
                base_similarity=raw_group["base_similarity"],
            ))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"Malformed concept pool {path}: {e}") from e
    check_pool(concepts, groups)
    return concepts, groups


def dump_concept_pool(concepts: List[Concept], groups: List[SemanticGroup], path: Union[str, Path]) -> None:
    """Write a pool in the format read by `load_concept_pool`."""
    by_id = {c.id: c for c in concepts}
    payload = {
        "groups": [
            {
                "group_id": group.group_id,
                "base_similarity": group.base_similarity,
                "members": [
                    by_id[cid].model_dump(include={"id", "term", "gloss", "difficulty"})
                    for cid in group.members
                ],
            }
            for group in groups
        ]
    }
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(payload, file, indent=2)


# ============================================================================
# Learning state
# ============================================================================

class LearningState(FrozenModel):
    """Per (learner, concept) state: difficulty, half-life, repetitions, mastery, interference.

    Field ranges are not enforced at construction; `validate_state` reports
    violations as data. `streak` counts consecutive successes since the last
    lapse (SM-2 repetition number, Anki learning step).
    """
    difficulty: float
    half_life: float
    repetition_count: int
    mastery: float
    interference: float
    last_review: Optional[int] = None
    streak: int = 0


def initial_state(difficulty: float, half_life: float = 1.0) -> LearningState:
    """State of a concept on first exposure."""
    return LearningState(
        difficulty=difficulty,
        half_life=half_life,
        repetition_count=0,
        mastery=0.0,
        interference=0.0,
        last_review=None,
    )


def assignment_difficulty(concept: Concept, learner_offset: float) -> float:
    """Per (learner, concept) difficulty fixed at assignment time."""
    return clamp_unit(concept.difficulty + learner_offset)


def _in_unit(x: float) -> bool:
    return math.isfinite(x) and 0.0 <= x <= 1.0


def validate_state(state: LearningState) -> List[str]:
    """Return one message per violated LearningState invariant; empty when valid."""
    violations = []
    if not _in_unit(state.difficulty):
        violations.append("d ∈ [0,1] violated")
    if not (math.isfinite(state.half_life) and state.half_life > 0):
        violations.append("h > 0 violated")
    if state.repetition_count < 0:
        violations.append("ρ ≥ 0 violated")
    if not _in_unit(state.mastery):
        violations.append("μ ∈ [0,1] violated")
    if not _in_unit(state.interference):
        violations.append("σ ∈ [0,1] violated")
    if (state.repetition_count == 0) != (state.last_review is None):
        violations.append("ρ=0 iff last_review none violated")
    if state.last_review is not None and state.last_review < 0:
        violations.append("last_review ≥ 0 violated")
    if not 0 <= state.streak <= max(state.repetition_count, 0):
        violations.append("0 ≤ streak ≤ ρ violated")
    return violations


# ============================================================================
# Learner profile and events
# ============================================================================

class LearnerProfile(FrozenModel):
    """Dynamic learner profile adapted by exponential moving averages."""
    success_rate: float = Field(0.5, ge=0.0, le=1.0)
    learning_speed: float = Field(0.5, ge=0.0, le=1.0)
    retention: float = Field(0.5, ge=0.0, le=1.0)
    semantic_sensitivity: float = Field(0.5, ge=0.0, le=1.0)
    adaptation_rate: float = Field(0.2, ge=0.0, le=1.0)

    def as_vector(self) -> Tuple[float, float, float, float]:
        return (self.success_rate, self.learning_speed, self.retention, self.semantic_sensitivity)


class ReviewEvent(FrozenModel):
    """One review attempt recorded by the simulator."""
    learner_id: int
    concept_id: str
    day: int = Field(..., ge=0)
    scheduled_interval: float = Field(..., ge=1.0)
    success: bool
    predicted_recall: float = Field(..., ge=0.0, le=1.0)
    scheduler_id: SchedulerId


class SimulationConfig(FrozenModel):
    """Experiment scale, seed, scheduler selection and interval bounds."""
    n_learners: int = Field(100, gt=0)
    n_days: int = Field(100, gt=0)
    concepts_per_learner: int = Field(25, gt=0)
    n_groups: int = Field(50, gt=0)
    seed: int = Field(42, ge=0, lt=2 ** 64)
    scheduler_ids: Tuple[SchedulerId, ...] = tuple(SchedulerId)
    provider: ProviderKind = ProviderKind.OFFLINE
    min_interval: float = Field(1.0, ge=1.0)
    max_interval: float = 365.0
    target_recall: float = Field(0.9, gt=0.0, lt=1.0)
    group_size: int = Field(5, gt=0)
    new_per_day: int = Field(5, gt=0)
    confusion_window: int = Field(3, ge=1)
    max_per_group: int = Field(2, ge=1)
    ablate_semantics: bool = False

    @field_validator('scheduler_ids')
    @classmethod
    def _unique_schedulers(cls, ids: Tuple[SchedulerId, ...]) -> Tuple[SchedulerId, ...]:
        if not ids:
            raise ValueError("scheduler_ids must name at least one scheduler")
        return tuple(dict.fromkeys(ids))

    @model_validator(mode='after')
    def _check_bounds(self) -> 'SimulationConfig':
        if self.min_interval > self.max_interval:
            raise ValueError("min_interval must not exceed max_interval")
        if self.concepts_per_learner > self.n_groups * self.group_size:
            raise ValueError("concepts_per_learner exceeds n_groups × group size")
        return self
