"""Anki default scheduling: learning steps, then interval × ease; lapses cost ease."""

from typing import Optional

from core.constants import AnkiConstants
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

DEFAULTS = AnkiConstants()


def anki_update(
    state: LearningState,
    outcome: bool,
    cfg: SimulationConfig,
    day: int,
    profile: Optional[LearnerProfile] = None,
    constants: AnkiConstants = DEFAULTS,
) -> SchedulerDecision:
    """One Anki review.

    `streak` is the position in the learning steps; once past them the
    previous interval (held in half_life) grows by the ease factor.
    """
    ease = decode_ease(state, constants.min_ease, constants.initial_ease)
    steps = constants.learning_steps
    if outcome:
        if state.streak < len(steps):
            raw = steps[state.streak]
        else:
            raw = state.half_life * ease
    else:
        raw = steps[0]
        ease = max(constants.min_ease, ease - constants.lapse_ease_penalty)
    interval = clamp_interval(raw, cfg)
    new_state = reviewed(state, day, outcome, half_life=interval, mastery=encode_ease(ease, constants.min_ease))
    return make_decision(interval, new_state, profile or LearnerProfile(), cfg, {"ease": ease})


class AnkiScheduler(Scheduler):
    scheduler_id = SchedulerId.ANKI

    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        return anki_update(state, success, self.cfg, ctx.day, ctx.profile, self.constants.anki)
