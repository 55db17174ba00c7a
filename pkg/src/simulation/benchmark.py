"""Run every configured scheduler on a shared world, for one seed or several."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from core.constants import EnvironmentConstants, SchedulerConstants
from core.types import SchedulerId, SimulationConfig
from logger import get_logger
from metrics.report import SchedulerReport, median_success_rates, summarize
from semantic.cache import SimilarityCache
from semantic.providers import OfflineSimilarityProvider
from simulation.runner import EventLog, World, build_world, run_simulation

logger = get_logger(__name__)


@dataclass
class SchedulerRun:
    cfg: SimulationConfig
    log: EventLog
    report: SchedulerReport


def run_schedulers(
    cfg: SimulationConfig,
    world: World,
    constants: Optional[SchedulerConstants] = None,
    environment: EnvironmentConstants = EnvironmentConstants(),
    jobs: int = 1,
) -> List[SchedulerRun]:
    """One run per scheduler in cfg.scheduler_ids.

    With cfg.ablate_semantics set, LECTOR additionally runs with an all-zero
    pressure signal (the environment keeps the true matrix) and is reported
    as `lector-ablated`.
    """
    plain = cfg.model_copy(update={"ablate_semantics": False})
    plans = [(plain, scheduler_id) for scheduler_id in cfg.scheduler_ids]
    if cfg.ablate_semantics:
        plans.append((cfg.model_copy(update={"ablate_semantics": True}), SchedulerId.LECTOR))

    runs = []
    for run_cfg, scheduler_id in plans:
        log, _ = run_simulation(run_cfg, scheduler_id, world, constants, environment, jobs)
        runs.append(SchedulerRun(run_cfg, log, summarize(log)))
    return runs


@dataclass
class BenchmarkResult:
    per_seed: Dict[int, List[SchedulerReport]] = field(default_factory=dict)

    @property
    def medians(self) -> Dict[str, float]:
        return median_success_rates(self.per_seed.values())


def run_benchmark(
    cfg: SimulationConfig,
    seeds: Sequence[int],
    provider_factory=OfflineSimilarityProvider,
    constants: Optional[SchedulerConstants] = None,
    environment: EnvironmentConstants = EnvironmentConstants(),
    cache: Optional[SimilarityCache] = None,
    jobs: int = 1,
) -> BenchmarkResult:
    """Repeat `run_schedulers` for each seed on a freshly generated world."""
    constants = constants or SchedulerConstants()
    result = BenchmarkResult()
    for seed in seeds:
        seed_cfg = cfg.model_copy(update={"seed": seed})
        logger.info(f"Benchmark seed {seed}")
        world = build_world(seed_cfg, provider_factory, cache, environment, constants.lector.adaptation_rate, jobs)
        runs = run_schedulers(seed_cfg, world, constants, environment, jobs)
        result.per_seed[seed] = [run.report for run in runs]
    return result
