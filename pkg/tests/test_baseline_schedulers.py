import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.constants import SspmmcConstants
from core.errors import ConvergenceError, SchedulerError
from core.types import LearnerProfile, LearningState, SchedulerId, SimulationConfig, initial_state, validate_state
from schedulers.anki import anki_update
from schedulers.base import ReviewContext, decode_ease
from schedulers.fsrs import fsrs_interval, fsrs_retrievability, fsrs_stability, fsrs_update
from schedulers.hlr import hlr_half_life, hlr_interval, hlr_recall, hlr_update
from schedulers.registry import build_scheduler
from schedulers.sm2 import sm2_ease, sm2_update
from schedulers.sspmmc import (
    SspmmcGrid,
    action_values,
    bellman_residual,
    greedy_targets,
    sspmmc_evaluate_policy,
    sspmmc_interval,
    sspmmc_policy,
    sspmmc_update,
)
from schedulers.threshold import threshold_interval, threshold_update


def run(update, outcomes, state=None, **kwargs):
    """Feed a sequence of outcomes through an update function; returns the decisions."""
    state = state or initial_state(0.5)
    decisions = []
    for day, outcome in enumerate(outcomes):
        decision = update(state, outcome, day=day, **kwargs)
        decisions.append(decision)
        state = decision.updated_state
    return decisions


class TestSm2:
    def test_canonical_intervals(self, cfg):
        decisions = run(lambda s, q, day: sm2_update(s, q, cfg, day), [5, 5, 5])
        intervals = [d.next_interval for d in decisions]
        assert intervals[:2] == [1.0, 6.0]
        assert intervals[2] == pytest.approx(6 * 2.8)

    def test_lapse_resets_repetition(self, cfg):
        decisions = run(lambda s, q, day: sm2_update(s, q, cfg, day), [5, 5, 5, 2])
        lapse = decisions[-1]
        assert lapse.next_interval == 1.0
        assert lapse.updated_state.streak == 0
        assert lapse.diagnostics["ease"] == pytest.approx(2.48)

    def test_success_after_lapse_restarts(self, cfg):
        decisions = run(lambda s, q, day: sm2_update(s, q, cfg, day), [5, 5, 5, 2, 4])
        assert decisions[-1].next_interval == 1.0

    @pytest.mark.parametrize("quality", [-1, 6])
    def test_quality_out_of_range(self, cfg, quality):
        with pytest.raises(SchedulerError):
            sm2_update(initial_state(0.5), quality, cfg, 0)

    def test_ease_formula(self):
        assert sm2_ease(2.5, 5) == pytest.approx(2.6)
        assert sm2_ease(2.5, 4) == pytest.approx(2.5)
        assert sm2_ease(1.3, 0) == 1.3

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 5), min_size=1, max_size=40))
    def test_ease_never_below_floor(self, qualities):
        cfg = SimulationConfig()
        state = initial_state(0.5)
        for day, quality in enumerate(qualities):
            decision = sm2_update(state, quality, cfg, day)
            assert decision.diagnostics["ease"] >= 1.3
            state = decision.updated_state
            assert decode_ease(state, 1.3, 2.5) >= 1.3


class TestHlr:
    def test_fresh_half_life(self):
        assert hlr_half_life(0, 0) == pytest.approx(2 ** 0.4)
        assert hlr_half_life(0, 0) == pytest.approx(1.3195, abs=1e-4)

    def test_interval_at_target(self):
        assert hlr_interval(10.0, 0.9) == pytest.approx(1.5200, abs=1e-4)

    def test_recall_at_half_life(self):
        assert hlr_recall(7.0, 7.0) == 0.5

    def test_update_counts_the_outcome(self, cfg):
        decision = hlr_update(initial_state(0.5), True, 0, 0, cfg, day=0)
        expected = 2 ** (0.3 * math.sqrt(2) - 0.4 + 0.5)
        assert decision.updated_state.half_life == pytest.approx(expected)
        assert decision.diagnostics["right"] == 1.0

    def test_failures_shorten_half_life(self):
        assert hlr_half_life(3, 2) < hlr_half_life(3, 0)


class TestFsrs:
    def test_interval_equals_stability_at_ninety_percent(self):
        assert fsrs_interval(7.3, 0.9) == pytest.approx(7.3)

    def test_failure_stability(self):
        assert fsrs_stability(4.0, 0.5, False, 1) == pytest.approx(0.5 * 4 ** 0.7)
        assert fsrs_stability(4.0, 0.5, False, 1) == pytest.approx(1.3195, abs=1e-4)
        assert fsrs_stability(1.2, 0.5, False, 1) == 1.0

    def test_success_stability(self):
        expected = 2.0 * (1 + math.exp(0.5) * (11 - 5) * 2.0 ** -0.2 * 0.05 * 1.5)
        assert fsrs_stability(2.0, 0.5, True, 3) == pytest.approx(expected)

    def test_good_rating_keeps_difficulty(self, cfg):
        state = initial_state(0.4)
        assert fsrs_update(state, True, 3, cfg, 0).updated_state.difficulty == 0.4

    def test_again_rating_raises_difficulty(self, cfg):
        state = initial_state(0.4)
        assert fsrs_update(state, False, 1, cfg, 0).updated_state.difficulty == pytest.approx(0.45)

    @pytest.mark.parametrize("rating", [0, 5])
    def test_rating_out_of_range(self, cfg, rating):
        with pytest.raises(SchedulerError):
            fsrs_update(initial_state(0.5), True, rating, cfg, 0)

    def test_retrievability(self):
        assert fsrs_retrievability(0.0, 3.0) == 1.0
        assert fsrs_retrievability(3.0, 3.0) == pytest.approx(0.9)


class TestAnki:
    def test_learning_steps_then_ease(self, cfg):
        decisions = run(lambda s, o, day: anki_update(s, o, cfg, day), [True, True, True])
        assert [d.next_interval for d in decisions[:2]] == [1.0, 3.0]
        assert decisions[2].next_interval == pytest.approx(7.5)

    def test_lapse(self, cfg):
        decisions = run(lambda s, o, day: anki_update(s, o, cfg, day), [True, True, True, False, True])
        assert decisions[3].next_interval == 1.0
        assert decisions[3].diagnostics["ease"] == pytest.approx(2.3)
        assert decisions[4].next_interval == 1.0

    def test_ease_floor(self, cfg):
        decisions = run(lambda s, o, day: anki_update(s, o, cfg, day), [True] + [False] * 10)
        assert decisions[-1].diagnostics["ease"] == pytest.approx(1.3)


class TestThreshold:
    def test_short_half_life_clamped(self, cfg):
        assert threshold_interval(1.0) == pytest.approx(0.3567, abs=1e-4)
        decision = threshold_update(initial_state(0.5, half_life=0.5), True, cfg, 0)
        assert decision.next_interval == 1.0

    def test_interval(self):
        assert threshold_interval(10.0) == pytest.approx(3.567, abs=1e-3)

    def test_two_successes_quadruple(self, cfg):
        decisions = run(lambda s, o, day: threshold_update(s, o, cfg, day), [True, True])
        assert decisions[-1].updated_state.half_life == 4.0

    def test_failure_floor(self, cfg):
        decision = threshold_update(initial_state(0.5, half_life=1.5), False, cfg, 0)
        assert decision.updated_state.half_life == 1.0


class TestSspmmcPolicy:
    @pytest.fixture(scope="class")
    def policy(self):
        return sspmmc_policy(SspmmcGrid.from_constants(SspmmcConstants()))

    def test_toy_chain_counts_doublings(self):
        one_step = SspmmcGrid(half_life_min=50, horizon_target=100, n_half_life_bins=2,
                              recall_targets=(1.0,), growth_base=2.0, growth_slope=0.0)
        assert sspmmc_policy(one_step).values[0].tolist() == [1.0, 0.0]
        two_steps = one_step.model_copy(update={"half_life_min": 25, "n_half_life_bins": 3})
        assert sspmmc_policy(two_steps).values[0] == pytest.approx([2.0, 1.0, 0.0])

    def test_absorbing_states(self, policy):
        assert np.all(policy.values[:, -1] == 0.0)
        assert np.all(policy.targets[:, -1] == 0.70)

    def test_bellman_residual(self, policy):
        assert bellman_residual(policy) < 1e-6
        assert policy.residual < 1e-6

    def test_greedy_reevaluation(self, policy):
        greedy = greedy_targets(action_values(policy.values, policy.grid), policy.grid)
        reevaluated = sspmmc_evaluate_policy(policy.grid, greedy)
        assert np.max(np.abs(reevaluated - policy.values)) < 1e-5

    def test_value_non_increasing_in_half_life(self, policy):
        assert np.all(np.diff(policy.values, axis=1) <= 1e-9)

    def test_harder_items_need_more_reviews(self, policy):
        assert np.all(np.diff(policy.values[:, 0]) >= -1e-9)

    def test_policy_is_shared(self):
        grid = SspmmcGrid.from_constants(SspmmcConstants())
        assert sspmmc_policy(grid) is sspmmc_policy(SspmmcGrid.from_constants(SspmmcConstants()))

    def test_non_convergence(self):
        with pytest.raises(ConvergenceError) as info:
            sspmmc_policy(SspmmcGrid(max_sweeps=1))
        assert info.value.residual > 0

    def test_interval(self):
        assert sspmmc_interval(10.0, 0.9) == pytest.approx(1.0536, abs=1e-4)

    def test_success_growth(self, cfg, policy):
        state = LearningState(difficulty=0.0, half_life=2.0, repetition_count=1, mastery=0.0,
                              interference=0.0, last_review=0, streak=1)
        decision = sspmmc_update(state, True, policy, cfg, day=3)
        assert decision.updated_state.half_life == pytest.approx(4.4)
        expected = max(cfg.min_interval, -4.4 * math.log(decision.diagnostics["target"]))
        assert decision.next_interval == pytest.approx(expected)

    def test_absorbing_state_stops_pushing(self, cfg, policy):
        state = LearningState(difficulty=0.5, half_life=150.0, repetition_count=5, mastery=0.0,
                              interference=0.0, last_review=10, streak=5)
        decision = sspmmc_update(state, True, policy, cfg, day=40)
        half_life = 150.0 * 1.8
        assert decision.next_interval == pytest.approx(-half_life * math.log(0.70))


CLAMP_CFG = SimulationConfig(min_interval=1.0, max_interval=30.0)


@pytest.mark.parametrize("scheduler_id", list(SchedulerId))
@settings(max_examples=200, deadline=None)
@given(steps=st.lists(
    st.tuples(st.booleans(), st.integers(1, 60), st.floats(0.0, 1.0)),
    min_size=1, max_size=25,
))
def test_intervals_stay_within_bounds(scheduler_id, steps):
    scheduler = build_scheduler(scheduler_id, CLAMP_CFG)
    state, profile = scheduler.initial_state(0.5), LearnerProfile()
    day, right, wrong = 0, 0, 0
    for success, gap, pressure in steps:
        elapsed = 0.0 if state.last_review is None else float(day - state.last_review)
        ctx = ReviewContext(day=day, elapsed=elapsed, pressure=pressure, profile=profile, right=right, wrong=wrong)
        recall = scheduler.predict_recall(state, ctx)
        assert 0.0 <= recall <= 1.0
        decision = scheduler.review(state, success, ctx)
        assert CLAMP_CFG.min_interval <= decision.next_interval <= CLAMP_CFG.max_interval
        assert validate_state(decision.updated_state) == []
        state, profile = decision.updated_state, decision.updated_profile
        right, wrong = right + success, wrong + (not success)
        day += gap


def test_unknown_scheduler(cfg):
    with pytest.raises(NotImplementedError):
        build_scheduler("leitner", cfg)


def test_non_lector_schedulers_keep_profile(cfg):
    profile = LearnerProfile(success_rate=0.9, learning_speed=0.1)
    for scheduler_id in SchedulerId:
        if scheduler_id is SchedulerId.LECTOR:
            continue
        scheduler = build_scheduler(scheduler_id, cfg)
        ctx = ReviewContext(day=0, profile=profile, recent=(1.0, 1.0, 1.0, 1.0))
        decision = scheduler.review(scheduler.initial_state(0.5), True, ctx)
        assert decision.updated_profile == profile
