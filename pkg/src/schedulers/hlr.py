"""Half-life regression with fixed weights over right/wrong review counts."""

import math
from typing import Optional

from core.constants import HlrConstants
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig
from schedulers.base import ReviewContext, Scheduler, SchedulerDecision, make_decision, reviewed

DEFAULTS = HlrConstants()


def hlr_half_life(right: int, wrong: int, constants: HlrConstants = DEFAULTS) -> float:
    """h = 2^(theta . x) with x = (sqrt(1+right), sqrt(1+wrong), 1)."""
    exponent = (
        constants.theta_right * math.sqrt(1 + right)
        + constants.theta_wrong * math.sqrt(1 + wrong)
        + constants.theta_bias
    )
    return 2.0 ** exponent


def hlr_recall(dt: float, half_life: float) -> float:
    return 2.0 ** (-dt / half_life)


def hlr_interval(half_life: float, target_recall: float) -> float:
    """Delay at which 2^(-dt/h) falls to the target recall."""
    return -half_life * math.log2(target_recall)


def hlr_update(
    state: LearningState,
    outcome: bool,
    right: int,
    wrong: int,
    cfg: SimulationConfig,
    day: int,
    profile: Optional[LearnerProfile] = None,
    constants: HlrConstants = DEFAULTS,
) -> SchedulerDecision:
    """Count the outcome, regress the new half-life and schedule at the target recall.

    `right` and `wrong` are the counts before this review.
    """
    right, wrong = (right + 1, wrong) if outcome else (right, wrong + 1)
    half_life = hlr_half_life(right, wrong, constants)
    new_state = reviewed(state, day, outcome, half_life=half_life)
    return make_decision(
        hlr_interval(half_life, cfg.target_recall),
        new_state,
        profile or LearnerProfile(),
        cfg,
        {"half_life": half_life, "right": float(right), "wrong": float(wrong)},
    )


class HlrScheduler(Scheduler):
    scheduler_id = SchedulerId.HLR

    def predict_recall(self, state: LearningState, ctx: ReviewContext) -> float:
        return hlr_recall(ctx.elapsed, state.half_life)

    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        return hlr_update(state, success, ctx.right, ctx.wrong, self.cfg, ctx.day, ctx.profile, self.constants.hlr)
