"""
FSRS-simplified: a two-parameter (stability, difficulty) reduction of FSRS.

Stability S lives in half_life and difficulty D in difficulty. Retrievability
decays as 0.9^(dt/S), so S is the interval at 90% recall.
"""

import math
from typing import Optional

from core.constants import FsrsConstants
from core.errors import SchedulerError
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig, clamp_unit
from schedulers.base import ReviewContext, Scheduler, SchedulerDecision, make_decision, reviewed

DEFAULTS = FsrsConstants()
REFERENCE_RECALL = 0.9


def fsrs_retrievability(dt: float, stability: float) -> float:
    return REFERENCE_RECALL ** (dt / stability)


def fsrs_stability(stability: float, difficulty: float, success: bool, rating: int, constants: FsrsConstants = DEFAULTS) -> float:
    if success:
        growth = (
            math.exp(0.5)
            * (11.0 - 10.0 * difficulty)
            * stability ** (-constants.stability_decay)
            * constants.growth_scale
            * (rating - 1.5)
        )
        return stability * (1.0 + growth)
    return max(constants.stability_floor, constants.lapse_scale * stability ** constants.lapse_exponent)


def fsrs_interval(stability: float, target_recall: float) -> float:
    return stability * math.log(target_recall) / math.log(REFERENCE_RECALL)


def fsrs_update(
    state: LearningState,
    outcome: bool,
    rating: int,
    cfg: SimulationConfig,
    day: int,
    profile: Optional[LearnerProfile] = None,
    constants: FsrsConstants = DEFAULTS,
) -> SchedulerDecision:
    if not 1 <= rating <= 4:
        raise SchedulerError(f"FSRS rating must be in 1..4, got {rating}")
    stability = fsrs_stability(state.half_life, state.difficulty, outcome, rating, constants)
    difficulty = clamp_unit(state.difficulty + constants.difficulty_step * (3 - rating) / 2.0)
    new_state = reviewed(state, day, outcome, half_life=stability, difficulty=difficulty)
    return make_decision(
        fsrs_interval(stability, cfg.target_recall),
        new_state,
        profile or LearnerProfile(),
        cfg,
        {"stability": stability, "difficulty": difficulty, "rating": float(rating)},
    )


class FsrsScheduler(Scheduler):
    scheduler_id = SchedulerId.FSRS

    def rating(self, success: bool) -> int:
        c = self.constants.fsrs
        return c.success_rating if success else c.failure_rating

    def predict_recall(self, state: LearningState, ctx: ReviewContext) -> float:
        return fsrs_retrievability(ctx.elapsed, state.half_life)

    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        return fsrs_update(state, success, self.rating(success), self.cfg, ctx.day, ctx.profile, self.constants.fsrs)
