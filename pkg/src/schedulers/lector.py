"""
LECTOR: semantic-aware, profile-adaptive interval optimization.

Retention follows an exponential forgetting curve whose effective half-life is
the product of a mastery-scaled half-life (tau), a semantic interference
discount (alpha) and a personalization factor (beta). The interval is the
delay at which that curve reaches the target recall, scaled by four factors
(semantic, mastery, repetition, personal) that each equal 1 at a neutral point.
"""

import math
from typing import Iterable, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from core.constants import LectorConstants
from core.errors import SchedulerError
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig, clamp_unit
from schedulers.base import (
    ReviewContext,
    Scheduler,
    SchedulerDecision,
    clamp_interval,
    make_decision,
    reviewed,
)

DEFAULTS = LectorConstants()

Observation = Tuple[float, float, float, float]


class RetentionParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    tau: float = Field(..., gt=0.0)
    alpha: float = Field(..., gt=0.0, le=1.0)
    beta: float = Field(..., gt=0.0)

    @property
    def effective_half_life(self) -> float:
        return self.tau * self.alpha * self.beta


class IntervalFactors(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: float = Field(..., gt=0.0)
    semantic: float = Field(..., gt=0.0)
    mastery: float = Field(..., gt=0.0)
    repetition: float = Field(..., gt=0.0)
    personal: float = Field(..., gt=0.0)

    def product(self) -> float:
        return self.base * self.semantic * self.mastery * self.repetition * self.personal


def lector_retention(dt: float, params: RetentionParams) -> float:
    """Recall probability after `dt` days under interference-aware forgetting."""
    if dt < 0:
        raise SchedulerError(f"Elapsed time must be non-negative, got {dt}")
    return math.exp(-dt / params.effective_half_life)


def lector_params(
    state: LearningState,
    profile: LearnerProfile,
    pressure: float,
    constants: LectorConstants = DEFAULTS,
) -> RetentionParams:
    tau = state.half_life * (1.0 + state.mastery)
    alpha = max(constants.alpha_floor, 1.0 - constants.kappa_sem * pressure * profile.semantic_sensitivity)
    beta = constants.beta_offset + profile.retention
    return RetentionParams(tau=tau, alpha=alpha, beta=beta)


def lector_interval(
    state: LearningState,
    profile: LearnerProfile,
    pressure: float,
    cfg: SimulationConfig,
    constants: LectorConstants = DEFAULTS,
) -> Tuple[float, IntervalFactors]:
    """Next interval and its factor breakdown."""
    params = lector_params(state, profile, pressure, constants)
    factors = IntervalFactors(
        base=-math.log(cfg.target_recall) * params.effective_half_life,
        semantic=1.0 - constants.pressure_discount * pressure,
        mastery=constants.mastery_offset + state.mastery,
        repetition=min(1.0 + constants.repetition_step * state.repetition_count, constants.repetition_cap),
        personal=constants.speed_offset + profile.learning_speed,
    )
    return clamp_interval(factors.product(), cfg), factors


def update_profile(profile: LearnerProfile, recent: Sequence[float]) -> LearnerProfile:
    """Exponential moving average of the profile toward recent performance."""
    if len(recent) != 4 or any(not 0.0 <= x <= 1.0 for x in recent):
        raise SchedulerError(f"recent metrics must be four values in [0,1], got {tuple(recent)}")
    lam = profile.adaptation_rate
    blended = [clamp_unit((1.0 - lam) * old + lam * new) for old, new in zip(profile.as_vector(), recent)]
    return LearnerProfile(
        success_rate=blended[0],
        learning_speed=blended[1],
        retention=blended[2],
        semantic_sensitivity=blended[3],
        adaptation_rate=lam,
    )


def speed_signal(elapsed: float, min_interval: float) -> float:
    """Inverse elapsed interval normalized into (0, 1]."""
    return min_interval / max(min_interval, elapsed)


def recent_metrics(window: Iterable[Observation]) -> Optional[Observation]:
    """Means of (success, speed signal, predicted recall, pressure) over a trailing window."""
    rows = list(window)
    if not rows:
        return None
    n = len(rows)
    return tuple(clamp_unit(sum(row[k] for row in rows) / n) for k in range(4))


def lector_update(
    state: LearningState,
    profile: LearnerProfile,
    outcome: bool,
    pressure: float,
    cfg: SimulationConfig,
    day: int,
    recent: Optional[Sequence[float]] = None,
    constants: LectorConstants = DEFAULTS,
) -> SchedulerDecision:
    """Apply one review: update half-life and mastery, adapt the profile, pick the interval."""
    mu = state.mastery
    if outcome:
        half_life = state.half_life * (constants.growth_base + constants.growth_mastery * mu)
        mastery = clamp_unit(mu + constants.mastery_gain * (1.0 - mu))
    else:
        half_life = max(constants.half_life_floor, state.half_life * constants.lapse_factor)
        mastery = clamp_unit(mu * constants.mastery_decay)

    new_state = reviewed(
        state, day, outcome,
        half_life=half_life,
        mastery=mastery,
        interference=clamp_unit(pressure),
    )
    new_profile = update_profile(profile, recent) if recent is not None else profile
    interval, factors = lector_interval(new_state, new_profile, pressure, cfg, constants)
    params = lector_params(new_state, new_profile, pressure, constants)
    diagnostics = {
        "I_base": factors.base,
        "F1_semantic": factors.semantic,
        "F2_mastery": factors.mastery,
        "F3_repetition": factors.repetition,
        "F4_personal": factors.personal,
        "tau": params.tau,
        "alpha": params.alpha,
        "beta": params.beta,
    }
    return make_decision(interval, new_state, new_profile, cfg, diagnostics)


class LectorScheduler(Scheduler):
    scheduler_id = SchedulerId.LECTOR

    @property
    def lector(self) -> LectorConstants:
        return self.constants.lector

    def predict_recall(self, state: LearningState, ctx: ReviewContext) -> float:
        return lector_retention(ctx.elapsed, lector_params(state, ctx.profile, ctx.pressure, self.lector))

    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        return lector_update(
            state, ctx.profile, success, ctx.pressure, self.cfg,
            day=ctx.day, recent=ctx.recent, constants=self.lector,
        )
