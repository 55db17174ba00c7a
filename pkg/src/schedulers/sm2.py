"""SuperMemo 2: ease factor, fixed first intervals, then geometric growth."""

from typing import Optional

from core.constants import Sm2Constants
from core.errors import SchedulerError
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig
from schedulers.base import (
    ReviewContext,
    Scheduler,
    SchedulerDecision,
    clamp_interval,
    decode_ease,
    encode_ease,
    make_decision,
    reviewed,
)

DEFAULTS = Sm2Constants()


def sm2_ease(ease: float, quality: int, min_ease: float = DEFAULTS.min_ease) -> float:
    """EF' = max(min_ease, EF + 0.1 - (5-q)(0.08 + (5-q)0.02))."""
    miss = 5 - quality
    return max(min_ease, ease + 0.1 - miss * (0.08 + miss * 0.02))


def sm2_interval(repetition: int, previous: float, ease: float, constants: Sm2Constants = DEFAULTS) -> float:
    """Interval after a correct answer given the repetition number before it."""
    if repetition == 0:
        return constants.first_interval
    if repetition == 1:
        return constants.second_interval
    return previous * ease


def sm2_update(
    state: LearningState,
    quality: int,
    cfg: SimulationConfig,
    day: int,
    profile: Optional[LearnerProfile] = None,
    constants: Sm2Constants = DEFAULTS,
) -> SchedulerDecision:
    """Canonical SM-2 step. Quality below 3 resets the repetition number and interval.

    The repetition number lives in `streak`; `profile` passes through unchanged.
    """
    if not 0 <= quality <= 5:
        raise SchedulerError(f"SM-2 quality must be in 0..5, got {quality}")
    ease = sm2_ease(decode_ease(state, constants.min_ease, constants.initial_ease), quality, constants.min_ease)
    success = quality >= 3
    if success:
        raw = sm2_interval(state.streak, state.half_life, ease, constants)
    else:
        raw = constants.first_interval
    interval = clamp_interval(raw, cfg)
    new_state = reviewed(state, day, success, half_life=interval, mastery=encode_ease(ease, constants.min_ease))
    return make_decision(interval, new_state, profile or LearnerProfile(), cfg, {"ease": ease, "quality": float(quality)})


class Sm2Scheduler(Scheduler):
    scheduler_id = SchedulerId.SM2

    def ease_of(self, state: LearningState) -> float:
        c = self.constants.sm2
        return decode_ease(state, c.min_ease, c.initial_ease)

    def quality(self, success: bool) -> int:
        c = self.constants.sm2
        return c.success_quality if success else c.failure_quality

    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        return sm2_update(state, self.quality(success), self.cfg, ctx.day, ctx.profile, self.constants.sm2)
