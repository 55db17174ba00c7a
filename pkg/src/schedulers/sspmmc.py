"""
SSP-MMC-simplified: a value-iteration threshold policy.

The planner discretizes (difficulty, half-life) and minimizes the expected
number of reviews until the half-life reaches the horizon target. An action is
a recall target r; reviewing at the delay where exp(-dt/h) = r succeeds with
probability r. Success multiplies h by growth(d) = growth_base - growth_slope * d,
failure multiplies it by failure_factor. Off-grid half-lives map to the
smallest bin at or above them; the last bin is absorbing.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.constants import SspmmcConstants
from core.errors import ConvergenceError
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig
from logger import get_logger
from schedulers.base import ReviewContext, Scheduler, SchedulerDecision, make_decision, reviewed

logger = get_logger(__name__)

DEFAULTS = SspmmcConstants()
BIN_TOLERANCE = 1e-9
MAX_POLICY_ROUNDS = 100


class SspmmcGrid(BaseModel):
    """Discretization and transition model of the planning problem."""
    model_config = ConfigDict(frozen=True)

    half_life_min: float = Field(DEFAULTS.half_life_min, gt=0.0)
    horizon_target: float = Field(DEFAULTS.horizon_target, gt=0.0)
    n_half_life_bins: int = Field(DEFAULTS.n_half_life_bins, ge=2)
    n_difficulty_bins: int = Field(DEFAULTS.n_difficulty_bins, ge=2)
    recall_targets: Tuple[float, ...] = DEFAULTS.recall_targets
    growth_base: float = Field(DEFAULTS.growth_base, gt=1.0)
    growth_slope: float = Field(DEFAULTS.growth_slope, ge=0.0)
    failure_factor: float = Field(DEFAULTS.failure_factor, gt=0.0, lt=1.0)
    tolerance: float = Field(DEFAULTS.tolerance, gt=0.0)
    max_sweeps: int = Field(DEFAULTS.max_sweeps, ge=1)

    @field_validator('recall_targets')
    @classmethod
    def _targets_in_range(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not v or any(not 0.0 < r <= 1.0 for r in v):
            raise ValueError(f"recall targets must be a non-empty set in (0, 1], got {v}")
        return tuple(sorted(set(v)))

    @classmethod
    def from_constants(cls, constants: SspmmcConstants = DEFAULTS) -> 'SspmmcGrid':
        return cls(**constants.model_dump(include=set(cls.model_fields)))

    def half_lives(self) -> np.ndarray:
        return np.geomspace(self.half_life_min, self.horizon_target, self.n_half_life_bins)

    def difficulties(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_difficulty_bins)

    def growth(self, difficulty: float) -> float:
        return self.growth_base - self.growth_slope * difficulty

    def half_life_bin(self, half_life: float) -> int:
        """Smallest bin whose half-life is at or above `half_life`."""
        idx = int(np.searchsorted(self.half_lives(), half_life - BIN_TOLERANCE, side='left'))
        return min(idx, self.n_half_life_bins - 1)

    def difficulty_bin(self, difficulty: float) -> int:
        return int(round(min(1.0, max(0.0, difficulty)) * (self.n_difficulty_bins - 1)))


@dataclass(frozen=True, eq=False)
class SspmmcPolicy:
    """Optimal recall target and expected remaining reviews per (difficulty, half-life) bin."""
    grid: SspmmcGrid
    targets: np.ndarray
    values: np.ndarray
    residual: float
    sweeps: int

    def __post_init__(self):
        for name in ('targets', 'values'):
            array = np.array(getattr(self, name), dtype=float)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def target_for(self, difficulty: float, half_life: float) -> float:
        return float(self.targets[self.grid.difficulty_bin(difficulty), self.grid.half_life_bin(half_life)])

    def value_for(self, difficulty: float, half_life: float) -> float:
        return float(self.values[self.grid.difficulty_bin(difficulty), self.grid.half_life_bin(half_life)])


def _transitions(grid: SspmmcGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Successor bin indices on success (n_d, n_h) and on failure (n_h,)."""
    half_lives = grid.half_lives()
    success = np.array([
        [grid.half_life_bin(h * grid.growth(d)) for h in half_lives]
        for d in grid.difficulties()
    ])
    failure = np.array([grid.half_life_bin(max(grid.half_life_min, h * grid.failure_factor)) for h in half_lives])
    return success, failure


def _q_values(values: np.ndarray, grid: SspmmcGrid, success: np.ndarray, failure: np.ndarray) -> np.ndarray:
    """Expected cost of each action in each state, shape (n_actions, n_d, n_h); 0 in absorbing states."""
    rows = np.arange(grid.n_difficulty_bins)[:, None]
    after_success = values[rows, success]
    after_failure = values[:, failure]
    targets = np.asarray(grid.recall_targets)[:, None, None]
    q = 1.0 + targets * after_success + (1.0 - targets) * after_failure
    q[:, :, -1] = 0.0
    return q


def sspmmc_evaluate_policy(grid: SspmmcGrid, targets: np.ndarray) -> np.ndarray:
    """Exact expected review count of a fixed target table, by solving its linear system."""
    success, failure = _transitions(grid)
    n_d, n_h = grid.n_difficulty_bins, grid.n_half_life_bins
    values = np.zeros((n_d, n_h))
    live = n_h - 1
    for k in range(n_d):
        system = np.eye(live)
        for i in range(live):
            r = targets[k, i]
            for j, p in ((success[k, i], r), (failure[i], 1.0 - r)):
                if j < live:
                    system[i, j] -= p
        try:
            values[k, :live] = np.linalg.solve(system, np.ones(live))
        except np.linalg.LinAlgError as e:
            raise ConvergenceError(float('inf'), 0) from e
    return values


def action_values(values: np.ndarray, grid: SspmmcGrid) -> np.ndarray:
    """Q(a, d, h) for a value table, actions ordered as grid.recall_targets."""
    success, failure = _transitions(grid)
    return _q_values(np.asarray(values, dtype=float), grid, success, failure)


def bellman_residual(policy: SspmmcPolicy) -> float:
    """max |min_a Q(V) - V| over all states."""
    success, failure = _transitions(policy.grid)
    q = _q_values(np.array(policy.values), policy.grid, success, failure)
    return float(np.max(np.abs(q.min(axis=0) - policy.values)))


def greedy_targets(q: np.ndarray, grid: SspmmcGrid) -> np.ndarray:
    """Cost-minimizing target per state for action values `q`; absorbing states get the lowest target."""
    targets = np.asarray(grid.recall_targets)[q.argmin(axis=0)]
    targets[:, -1] = min(grid.recall_targets)
    return targets


@lru_cache(maxsize=8)
def sspmmc_policy(grid: SspmmcGrid) -> SspmmcPolicy:
    """Solve the grid by value iteration, then polish with exact policy evaluation.

    Raises:
        ConvergenceError: if value iteration has not met the tolerance after max_sweeps.
    """
    success, failure = _transitions(grid)
    values = np.zeros((grid.n_difficulty_bins, grid.n_half_life_bins))
    residual = float('inf')
    sweeps = 0
    while residual >= grid.tolerance:
        if sweeps >= grid.max_sweeps:
            raise ConvergenceError(residual, sweeps)
        updated = _q_values(values, grid, success, failure).min(axis=0)
        residual = float(np.max(np.abs(updated - values)))
        values = updated
        sweeps += 1

    targets = greedy_targets(_q_values(values, grid, success, failure), grid)
    for _ in range(MAX_POLICY_ROUNDS):
        values = sspmmc_evaluate_policy(grid, targets)
        q = _q_values(values, grid, success, failure)
        best = q.min(axis=0)
        current = np.take_along_axis(
            q, np.searchsorted(grid.recall_targets, targets)[None, :, :], axis=0
        )[0]
        if not np.any(best < current - 1e-12):
            break
        improved = greedy_targets(q, grid)
        targets = np.where(best < current - 1e-12, improved, targets)

    policy = SspmmcPolicy(grid=grid, targets=targets, values=values, residual=0.0, sweeps=sweeps)
    residual = bellman_residual(policy)
    logger.info(f"SSP-MMC policy solved in {sweeps} sweeps, Bellman residual {residual:.2e}")
    return SspmmcPolicy(grid=grid, targets=targets, values=values, residual=residual, sweeps=sweeps)


def sspmmc_interval(half_life: float, target: float) -> float:
    return -half_life * math.log(target)


def sspmmc_update(
    state: LearningState,
    outcome: bool,
    policy: SspmmcPolicy,
    cfg: SimulationConfig,
    day: int,
    profile: Optional[LearnerProfile] = None,
) -> SchedulerDecision:
    """Move h through the planner's transition model and review at the policy's target."""
    grid = policy.grid
    if outcome:
        half_life = state.half_life * grid.growth(state.difficulty)
    else:
        half_life = max(grid.half_life_min, state.half_life * grid.failure_factor)
    target = policy.target_for(state.difficulty, half_life)
    new_state = reviewed(state, day, outcome, half_life=half_life)
    return make_decision(
        sspmmc_interval(half_life, target),
        new_state,
        profile or LearnerProfile(),
        cfg,
        {"target": target, "expected_reviews": policy.value_for(state.difficulty, half_life)},
    )


class SspmmcScheduler(Scheduler):
    scheduler_id = SchedulerId.SSPMMC

    @property
    def policy(self) -> SspmmcPolicy:
        return sspmmc_policy(SspmmcGrid.from_constants(self.constants.sspmmc))

    def review(self, state: LearningState, success: bool, ctx: ReviewContext) -> SchedulerDecision:
        return sspmmc_update(state, success, self.policy, self.cfg, ctx.day, ctx.profile)
