"""
Latent learner environment: the ground truth every scheduler is scored against.

Recall decays exponentially with the true half-life, capped by the learner's
ability and cut by confusion with concepts reviewed shortly before. It is
deliberately a different model from every scheduler's own.
"""

import math
from typing import Mapping, Optional

from pydantic import Field

from core.constants import EnvironmentConstants
from core.types import FrozenModel
from semantic.matrix import InterferenceMatrix, interference_pressure
from simulation.population import LearnerTraits

DEFAULTS = EnvironmentConstants()


class LatentMemory(FrozenModel):
    true_half_life: float = Field(..., gt=0.0)
    exposure_count: int = Field(0, ge=0)


def initial_memory(traits: LearnerTraits, env: EnvironmentConstants = DEFAULTS) -> LatentMemory:
    """Memory of a freshly introduced concept; faster learners start with a longer half-life."""
    return LatentMemory(true_half_life=env.initial_half_life * (env.initial_speed_offset + traits.speed))


def p_max(traits: LearnerTraits, env: EnvironmentConstants = DEFAULTS) -> float:
    return min(1.0, env.p_max_base + env.p_max_ability * traits.ability)


def recall_probability(
    mem: LatentMemory,
    traits: LearnerTraits,
    dt: float,
    confusion: float,
    env: EnvironmentConstants = DEFAULTS,
) -> float:
    """p = p_floor + (p_max - p_floor) * exp(-dt/h) * (1 - penalty * confusion * confusability)."""
    ceiling = p_max(traits, env)
    decay = math.exp(-dt / mem.true_half_life)
    interference = 1.0 - env.confusion_penalty * confusion * traits.confusability
    return env.p_floor + (ceiling - env.p_floor) * decay * interference


def latent_update(
    mem: LatentMemory,
    traits: LearnerTraits,
    success: bool,
    difficulty: float,
    env: EnvironmentConstants = DEFAULTS,
    elapsed: Optional[float] = None,
) -> LatentMemory:
    """Half-life after one review.

    Without `elapsed` the full multiplicative step applies: a success scales h by
    (base - k*d) * (retention_base + retention_scale * base_retention), a lapse
    by `lapse_factor`. With `elapsed` both steps are weighted by how much was
    forgotten since the last review, 1 - exp(-elapsed/h), relative to the
    `spacing_reference` and `slip_reference` ratios. Success growth also needs
    consolidation: reviews at most a day apart earn `next_day_consolidation`
    of it, longer gaps ramp to full over `consolidation_days`.
    """
    h = mem.true_half_life
    if success:
        growth = (env.success_growth_base - env.success_growth_difficulty * difficulty) * (
            env.retention_base + env.retention_scale * traits.base_retention
        )
        if elapsed is None:
            half_life = h * growth
        else:
            forgotten = -math.expm1(-elapsed / h) / -math.expm1(-env.spacing_reference)
            if elapsed <= 1.0:
                consolidation = env.next_day_consolidation * elapsed
            else:
                consolidation = min(1.0, elapsed / env.consolidation_days)
            half_life = h * (1.0 + (growth - 1.0) * forgotten * consolidation)
    else:
        loss = 1.0 - env.lapse_factor
        if elapsed is not None:
            loss *= min(1.0, -math.expm1(-elapsed / h) / -math.expm1(-env.slip_reference))
        half_life = max(env.half_life_floor, h * (1.0 - loss))
    return LatentMemory(true_half_life=half_life, exposure_count=mem.exposure_count + 1)


def confusion_at(
    matrix: InterferenceMatrix,
    target: int,
    last_reviewed: Mapping[int, int],
    today: int,
    window: int = 3,
) -> float:
    """Interference from the concepts reviewed in the last `window` days.

    Args:
        matrix: Interference matrix of the pool.
        target: Matrix index of the concept under review.
        last_reviewed: Matrix index -> day of that concept's latest review.
        today: Current day.
        window: Look-back in days; a review exactly `window` days ago still counts.
    """
    active = [k for k, day in last_reviewed.items() if 0 <= today - day <= window and k != target]
    return interference_pressure(matrix, target, active)
