"""
Tunable constants for schedulers and the learner environment.

Every default here is tunable; experiment files
override any of them under `scheduler_overrides` / `environment_overrides`.
"""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class ConstantsModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid', populate_by_name=True)


class LectorConstants(ConstantsModel):
    kappa_sem: float = Field(0.5, ge=0.0)
    alpha_floor: float = Field(0.1, gt=0.0, le=1.0)
    beta_offset: float = Field(0.5, gt=0.0)
    adaptation_rate: float = Field(0.2, ge=0.0, le=1.0, alias='lambda')
    growth_base: float = Field(1.6, gt=0.0)
    growth_mastery: float = Field(0.4, ge=0.0)
    lapse_factor: float = Field(0.5, gt=0.0, le=1.0)
    half_life_floor: float = Field(1.0, gt=0.0)
    mastery_gain: float = Field(0.1, ge=0.0, le=1.0)
    mastery_decay: float = Field(0.7, ge=0.0, le=1.0)
    pressure_discount: float = Field(0.3, ge=0.0, lt=1.0)
    mastery_offset: float = Field(0.5, gt=0.0)
    repetition_step: float = Field(0.1, ge=0.0)
    repetition_cap: float = Field(2.0, ge=1.0)
    speed_offset: float = Field(0.5, gt=0.0)
    profile_window: int = Field(20, ge=1)


class Sm2Constants(ConstantsModel):
    initial_ease: float = Field(2.5, ge=1.3)
    min_ease: float = Field(1.3, gt=0.0)
    first_interval: float = Field(1.0, gt=0.0)
    second_interval: float = Field(6.0, gt=0.0)
    success_quality: int = Field(5, ge=0, le=5)
    failure_quality: int = Field(2, ge=0, le=5)


class HlrConstants(ConstantsModel):
    theta_right: float = 0.3
    theta_wrong: float = -0.4
    theta_bias: float = 0.5


class FsrsConstants(ConstantsModel):
    growth_scale: float = Field(0.05, gt=0.0)
    stability_decay: float = Field(0.2, ge=0.0)
    lapse_scale: float = Field(0.5, gt=0.0)
    lapse_exponent: float = Field(0.7, gt=0.0)
    stability_floor: float = Field(1.0, gt=0.0)
    difficulty_step: float = Field(0.05, ge=0.0)
    success_rating: int = Field(3, ge=1, le=4)
    failure_rating: int = Field(1, ge=1, le=4)


class AnkiConstants(ConstantsModel):
    learning_steps: Tuple[float, ...] = (1.0, 3.0)
    initial_ease: float = Field(2.5, ge=1.3)
    min_ease: float = Field(1.3, gt=0.0)
    lapse_ease_penalty: float = Field(0.2, ge=0.0)

    @field_validator('learning_steps')
    @classmethod
    def _steps_positive(cls, steps: Tuple[float, ...]) -> Tuple[float, ...]:
        if not steps or any(s <= 0 for s in steps):
            raise ValueError("learning_steps must be non-empty and positive")
        return steps


class ThresholdConstants(ConstantsModel):
    recall_threshold: float = Field(0.7, gt=0.0, lt=1.0)
    success_factor: float = Field(2.0, gt=1.0)
    failure_factor: float = Field(0.5, gt=0.0, le=1.0)
    half_life_floor: float = Field(1.0, gt=0.0)


class SspmmcConstants(ConstantsModel):
    growth_base: float = Field(2.2, gt=1.0)
    growth_slope: float = Field(0.8, ge=0.0)
    failure_factor: float = Field(0.5, gt=0.0, lt=1.0)
    half_life_min: float = Field(1.0, gt=0.0)
    horizon_target: float = Field(100.0, gt=0.0)
    recall_targets: Tuple[float, ...] = (0.70, 0.75, 0.80, 0.85, 0.90, 0.95)
    n_half_life_bins: int = Field(40, ge=2)
    n_difficulty_bins: int = Field(5, ge=2)
    tolerance: float = Field(1e-6, gt=0.0)
    max_sweeps: int = Field(10_000, ge=1)


class SchedulerConstants(ConstantsModel):
    lector: LectorConstants = LectorConstants()
    sm2: Sm2Constants = Sm2Constants()
    hlr: HlrConstants = HlrConstants()
    fsrs: FsrsConstants = FsrsConstants()
    anki: AnkiConstants = AnkiConstants()
    threshold: ThresholdConstants = ThresholdConstants()
    sspmmc: SspmmcConstants = SspmmcConstants()


class EnvironmentConstants(ConstantsModel):
    """Latent learner model: the ground truth every scheduler is scored against."""
    p_floor: float = Field(0.05, ge=0.0, lt=1.0)
    p_max_base: float = Field(0.6, ge=0.0, le=1.0)
    p_max_ability: float = Field(0.38, ge=0.0)
    confusion_penalty: float = Field(0.4, ge=0.0, le=1.0)
    success_growth_base: float = Field(1.8, gt=0.0)
    success_growth_difficulty: float = Field(0.6, ge=0.0)
    retention_base: float = Field(0.8, gt=0.0)
    retention_scale: float = Field(0.4, ge=0.0)
    lapse_factor: float = Field(0.6, gt=0.0, le=1.0)
    half_life_floor: float = Field(0.5, gt=0.0)
    spacing_reference: float = Field(0.05, gt=0.0)
    next_day_consolidation: float = Field(0.0, ge=0.0, le=1.0)
    consolidation_days: float = Field(3.0, gt=0.0)
    slip_reference: float = Field(0.3, gt=0.0)
    initial_half_life: float = Field(20.0, gt=0.0)
    initial_speed_offset: float = Field(0.5, ge=0.0)
    difficulty_offset_scale: float = Field(0.2, ge=0.0)
    trait_alpha: float = Field(4.0, gt=0.0)
    trait_beta: float = Field(4.0, gt=0.0)
    base_similarity_range: Tuple[float, float] = (0.5, 0.9)
    difficulty_range: Tuple[float, float] = (0.2, 0.8)
    stem_length: int = Field(5, ge=4)
