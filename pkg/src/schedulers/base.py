"""
Shared scheduling interface.

Every scheduler maps (state, outcome, context) to a SchedulerDecision. The
schedulers share the LearningState schema and document their private reading
of its fields:

- LECTOR: all five fields as defined.
- SM-2 / Anki: half_life holds the last interval, mastery an encoded ease
  factor (see `encode_ease`), streak the consecutive-success count.
- HLR: half_life holds the regressed half-life (base 2).
- FSRS-simplified: half_life holds stability S, difficulty holds D.
- THRESHOLD / SSP-MMC-simplified: half_life holds the modeled half-life (base e).

repetition_count is the total number of reviews for every scheduler.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from core.constants import SchedulerConstants
from core.errors import SchedulerError
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig, initial_state, validate_state


class SchedulerDecision(BaseModel):
    """Next interval plus the updated state and profile of one review."""
    model_config = ConfigDict(frozen=True)

    next_interval: float
    updated_state: LearningState
    updated_profile: LearnerProfile
    diagnostics: Dict[str, float] = {}


@dataclass(frozen=True)
class ReviewContext:
    """Everything a scheduler may read about the review being processed.

    Attributes:
        day: Day index of the review.
        elapsed: Days since the previous review of this concept (0 on first review).
        pressure: Semantic interference pressure in [0, 1].
        profile: The learner's current profile.
        right: Successful reviews of this concept before this one.
        wrong: Failed reviews of this concept before this one.
        recent: Trailing-window means feeding the profile update, if any.
    """
    day: int
    elapsed: float = 0.0
    pressure: float = 0.0
    profile: LearnerProfile = field(default_factory=LearnerProfile)
    right: int = 0
    wrong: int = 0
    recent: Optional[Tuple[float, float, float, float]] = None


def clamp_interval(interval: float, cfg: SimulationConfig) -> float:
    """Clamp an interval into [min_interval, max_interval]."""
    if math.isnan(interval):
        raise SchedulerError("Scheduler produced a NaN interval")
    return min(cfg.max_interval, max(cfg.min_interval, interval))


def encode_ease(ease: float, min_ease: float) -> float:
    """Store an ease factor ≥ min_ease in the [0,1) mastery slot."""
    return 1.0 - min_ease / ease


def decode_ease(state: LearningState, min_ease: float, initial_ease: float) -> float:
    """Ease factor held by a state; unreviewed states start at `initial_ease`."""
    if state.repetition_count == 0:
        return initial_ease
    return min_ease / (1.0 - state.mastery)


def reviewed(state: LearningState, day: int, success: bool, **changes) -> LearningState:
    """Copy of `state` after one review on `day`, with the given field changes."""
    return state.model_copy(update={
        "repetition_count": state.repetition_count + 1,
        "last_review": day,
        "streak": state.streak + 1 if success else 0,
        **changes,
    })


def make_decision(
    interval: float,
    state: LearningState,
    profile: LearnerProfile,
    cfg: SimulationConfig,
    diagnostics: Optional[Dict[str, float]] = None,
) -> SchedulerDecision:
    """Build a decision, checking the interval bounds and the state invariants.

    Raises:
        SchedulerError: if the updated state violates a LearningState invariant.
    """
    next_interval = clamp_interval(interval, cfg)
    violations = validate_state(state)
    if violations:
        raise SchedulerError(f"Scheduler produced an invalid state: {', '.join(violations)}")
    return SchedulerDecision(
        next_interval=next_interval,
        updated_state=state,
        updated_profile=profile,
        diagnostics=dict(diagnostics or {}),
    )


class Scheduler(ABC):
    """Base class of all schedulers; instances hold configuration only."""

    scheduler_id: SchedulerId

    def __init__(self, cfg: SimulationConfig, constants: Optional[SchedulerConstants] = None):
        self.cfg = cfg
        self.constants = constants or SchedulerConstants()

    def initial_state(self, difficulty: float) -> LearningState:
        return initial_state(difficulty)

    def predict_recall(self, state: LearningState, ctx: ReviewContext) -> float:
        """Recall probability the scheduler's own model assigns at review time."""
        return math.exp(-ctx.elapsed / state.half_life)

    @abstractmethod
    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        """Apply one review outcome and choose the next interval."""
