"""THRESHOLD: double or halve the half-life, review when recall hits a fixed threshold."""

import math
from typing import Optional

from core.constants import ThresholdConstants
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig
from schedulers.base import ReviewContext, Scheduler, SchedulerDecision, make_decision, reviewed

DEFAULTS = ThresholdConstants()


def threshold_interval(half_life: float, recall_threshold: float = DEFAULTS.recall_threshold) -> float:
    """Delay at which exp(-dt/h) falls to the threshold."""
    return -half_life * math.log(recall_threshold)


def threshold_update(
    state: LearningState,
    outcome: bool,
    cfg: SimulationConfig,
    day: int,
    profile: Optional[LearnerProfile] = None,
    constants: ThresholdConstants = DEFAULTS,
) -> SchedulerDecision:
    if outcome:
        half_life = state.half_life * constants.success_factor
    else:
        half_life = max(constants.half_life_floor, state.half_life * constants.failure_factor)
    new_state = reviewed(state, day, outcome, half_life=half_life)
    return make_decision(
        threshold_interval(half_life, constants.recall_threshold),
        new_state,
        profile or LearnerProfile(),
        cfg,
        {"half_life": half_life},
    )


class ThresholdScheduler(Scheduler):
    scheduler_id = SchedulerId.THRESHOLD

    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        return threshold_update(state, success, self.cfg, ctx.day, ctx.profile, self.constants.threshold)
