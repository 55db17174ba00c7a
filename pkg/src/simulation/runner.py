"""
Day-by-day review loop.

Learners are independent: each has its own random stream, concept assignment
and scheduler instance, so they run serially or in worker processes with the
same result. The merged log is sorted by (day, learner_id, concept_id).
"""

import hashlib
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Optional, Sequence, Tuple, Union

from core.constants import EnvironmentConstants, SchedulerConstants
from core.errors import SchedulerError, SimulationAbortedError
from core.types import (
    Concept,
    LearnerProfile,
    LearningState,
    ReviewEvent,
    SchedulerId,
    SemanticGroup,
    SimulationConfig,
    assignment_difficulty,
    clamp_unit,
)
from logger import get_logger
from schedulers.base import ReviewContext
from schedulers.lector import Observation, recent_metrics, speed_signal
from schedulers.registry import build_scheduler
from semantic.cache import SimilarityCache
from semantic.matrix import InterferenceMatrix, build_matrix
from semantic.providers import OfflineSimilarityProvider, SimilarityProvider
from simulation.environment import confusion_at, initial_memory, latent_update, recall_probability
from simulation.population import (
    STREAM_ASSIGNMENT,
    STREAM_LEARNER,
    LearnerTraits,
    assign_concepts,
    generate_concepts,
    generate_population,
    stream_rng,
)

logger = get_logger(__name__)

ABLATED_SUFFIX = "-ablated"

StateKey = Tuple[int, str]


def config_hash(cfg: SimulationConfig) -> str:
    return hashlib.sha256(cfg.model_dump_json().encode('utf-8')).hexdigest()


def due_offset(interval: float) -> int:
    """Whole days until the next review: round half up, at least one."""
    return max(1, int(Decimal(repr(interval)).quantize(Decimal(1), rounding=ROUND_HALF_UP)))


def event_sort_key(event: ReviewEvent) -> Tuple[int, int, str]:
    return event.day, event.learner_id, event.concept_id


@dataclass(frozen=True)
class EventLog:
    """Review events of one run, sorted by (day, learner_id, concept_id).

    `label` names the run in reports; it differs from the scheduler id only for
    ablation runs.
    """
    events: Tuple[ReviewEvent, ...]
    config_hash: str
    label: str = ""

    def __post_init__(self):
        keys = [event_sort_key(e) for e in self.events]
        if any(a > b for a, b in zip(keys, keys[1:])):
            raise ValueError("EventLog events must be sorted by (day, learner_id, concept_id)")

    def __len__(self) -> int:
        return len(self.events)

    def digest(self) -> str:
        h = hashlib.sha256()
        for event in self.events:
            h.update(event.model_dump_json().encode('utf-8'))
            h.update(b"\n")
        return h.hexdigest()


@dataclass
class World:
    """Everything shared by the runs of one seed: learners, pool, assignments and matrix."""
    population: List[Tuple[LearnerTraits, LearnerProfile]]
    concepts: List[Concept]
    groups: List[SemanticGroup]
    assignments: List[List[Concept]]
    matrix: InterferenceMatrix


def build_world(
    cfg: SimulationConfig,
    provider_factory,
    cache: Optional[SimilarityCache] = None,
    environment: EnvironmentConstants = EnvironmentConstants(),
    adaptation_rate: float = 0.2,
    jobs: int = 1,
) -> World:
    """Generate the population and pool for cfg.seed and score the interference matrix.

    Args:
        provider_factory: Callable taking the semantic groups and returning the
            similarity provider (the offline provider needs the group priors).

    Raises:
        ConfigurationError: when the pool cannot supply concepts_per_learner concepts.
        SimilarityError: propagated from the provider.
    """
    population = generate_population(cfg, cfg.seed, environment, adaptation_rate)
    concepts, groups = generate_concepts(cfg, cfg.seed, environment)
    assignments = [
        assign_concepts(concepts, groups, cfg.concepts_per_learner,
                        stream_rng(cfg.seed, STREAM_ASSIGNMENT, learner_id), cfg.max_per_group)
        for learner_id in range(cfg.n_learners)
    ]
    provider: SimilarityProvider = provider_factory(groups)
    logger.info(f"Scoring interference matrix over {len(concepts)} concepts with the {provider.tag.value} provider")
    matrix = build_matrix(concepts, provider, cache, jobs=jobs)
    return World(population, concepts, groups, assignments, matrix)


@dataclass
class LearnerRun:
    learner_id: int
    events: List[ReviewEvent] = field(default_factory=list)
    states: Dict[str, LearningState] = field(default_factory=dict)
    error: Optional[str] = None


@dataclass(frozen=True)
class LearnerTask:
    learner_id: int
    traits: LearnerTraits
    profile: LearnerProfile
    assigned: Tuple[Concept, ...]
    matrix: InterferenceMatrix
    cfg: SimulationConfig
    scheduler_id: SchedulerId
    constants: SchedulerConstants
    environment: EnvironmentConstants


def simulate_learner(task: LearnerTask) -> LearnerRun:
    """Run one learner through all days; a scheduler error stops the learner and is reported."""
    cfg, env = task.cfg, task.environment
    rng = stream_rng(cfg.seed, STREAM_LEARNER, task.learner_id)
    scheduler = build_scheduler(task.scheduler_id, cfg, task.constants)
    offset = env.difficulty_offset_scale * (0.5 - task.traits.ability)
    window: deque = deque(maxlen=task.constants.lector.profile_window)

    run = LearnerRun(task.learner_id)
    memory = {}
    due: Dict[str, int] = {}
    right: Dict[str, int] = {}
    wrong: Dict[str, int] = {}
    last_reviewed: Dict[int, int] = {}
    scheduler_matrix = task.matrix.zeros_like() if cfg.ablate_semantics else task.matrix
    profile = task.profile
    pending = list(task.assigned)

    for day in range(cfg.n_days):
        introduced, pending = pending[:cfg.new_per_day], pending[cfg.new_per_day:]
        for concept in introduced:
            run.states[concept.id] = scheduler.initial_state(assignment_difficulty(concept, offset))
            memory[concept.id] = initial_memory(task.traits, env)
            due[concept.id] = day
            right[concept.id] = wrong[concept.id] = 0

        for concept_id in sorted(cid for cid, d in due.items() if d <= day):
            state = run.states[concept_id]
            target = task.matrix.index(concept_id)
            confusion = confusion_at(task.matrix, target, last_reviewed, day, cfg.confusion_window)
            pressure = confusion_at(scheduler_matrix, target, last_reviewed, day, cfg.confusion_window)
            elapsed = 0.0 if state.last_review is None else float(day - state.last_review)
            ctx = ReviewContext(
                day=day, elapsed=elapsed, pressure=pressure, profile=profile,
                right=right[concept_id], wrong=wrong[concept_id],
            )
            predicted = clamp_unit(scheduler.predict_recall(state, ctx))
            p = recall_probability(memory[concept_id], task.traits, elapsed, confusion, env)
            success = bool(rng.random() < p)
            memory[concept_id] = latent_update(
                memory[concept_id], task.traits, success, state.difficulty, env, elapsed=elapsed
            )

            observation: Observation = (float(success), speed_signal(elapsed, cfg.min_interval), predicted, pressure)
            window.append(observation)
            try:
                decision = scheduler.review(state, success, replace(ctx, recent=recent_metrics(window)))
            except SchedulerError as e:
                run.error = f"learner {task.learner_id}, concept {concept_id}, day {day}: {e}"
                return run

            run.states[concept_id] = decision.updated_state
            profile = decision.updated_profile
            if success:
                right[concept_id] += 1
            else:
                wrong[concept_id] += 1
            due[concept_id] = day + due_offset(decision.next_interval)
            last_reviewed[target] = day
            run.events.append(ReviewEvent(
                learner_id=task.learner_id,
                concept_id=concept_id,
                day=day,
                scheduled_interval=decision.next_interval,
                success=success,
                predicted_recall=predicted,
                scheduler_id=task.scheduler_id,
            ))
    return run


def run_label(scheduler_id: SchedulerId, cfg: SimulationConfig) -> str:
    return scheduler_id.value + (ABLATED_SUFFIX if cfg.ablate_semantics else "")


def run_simulation(
    cfg: SimulationConfig,
    scheduler_id: Union[SchedulerId, str],
    world: Optional[World] = None,
    constants: Optional[SchedulerConstants] = None,
    environment: EnvironmentConstants = EnvironmentConstants(),
    jobs: int = 1,
    provider_factory=None,
    cache: Optional[SimilarityCache] = None,
) -> Tuple[EventLog, Dict[StateKey, LearningState]]:
    """Simulate every learner of `world` under one scheduler.

    Without a prebuilt world one is generated from cfg, scored by
    `provider_factory` (the offline provider by default).

    Returns:
        The sorted event log and the final state of every (learner_id, concept_id).

    Raises:
        SimulationAbortedError: when a scheduler error stops a learner; it carries
            the events recorded up to that point.
    """
    scheduler_id = SchedulerId(scheduler_id)
    constants = constants or SchedulerConstants()
    if world is None:
        world = build_world(cfg, provider_factory or OfflineSimilarityProvider, cache, environment,
                            constants.lector.adaptation_rate, jobs)
    label = run_label(scheduler_id, cfg)
    tasks = [
        LearnerTask(
            learner_id=learner_id,
            traits=traits,
            profile=profile,
            assigned=tuple(world.assignments[learner_id]),
            matrix=world.matrix,
            cfg=cfg,
            scheduler_id=scheduler_id,
            constants=constants,
            environment=environment,
        )
        for learner_id, (traits, profile) in enumerate(world.population)
    ]
    logger.info(f"Simulating {label}: {cfg.n_learners} learners x {cfg.n_days} days (jobs={jobs})")
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs: Sequence[LearnerRun] = list(pool.map(simulate_learner, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        runs = [simulate_learner(task) for task in tasks]

    events = sorted((e for run in runs for e in run.events), key=event_sort_key)
    log = EventLog(tuple(events), config_hash(cfg), label)
    errors = [run.error for run in runs if run.error]
    if errors:
        raise SimulationAbortedError(SchedulerError(errors[0]), log)

    states = {(run.learner_id, cid): state for run in runs for cid, state in run.states.items()}
    logger.info(f"Finished {label}: {len(log)} reviews")
    return log, states
