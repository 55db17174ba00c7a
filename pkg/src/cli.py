"""
Command-line front end.

    simulate --config PATH [--seed N] [--jobs N] [--schedulers a,b] [--plot]
             [--ablate-semantics] [--seeds a,b,c]
    matrix   --pool PATH [--provider offline|llm] [--stats] [--cache PATH] [--out DIR]
    cache    stats|clear [--cache PATH]
    pool     --out PATH [--groups N] [--group-size N] [--seed N]

Exit codes: 0 success, 2 configuration error, 3 similarity provider failure,
4 scheduler error.
"""

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from config import get_cache_path
from core.constants import EnvironmentConstants, SchedulerConstants
from core.errors import (
    ConfigurationError,
    SchedulerError,
    SimilarityError,
    SimulationAbortedError,
)
from core.types import (
    ProviderKind,
    SchedulerId,
    SimulationConfig,
    dump_concept_pool,
    load_concept_pool,
)
from logger import setup_logger
from metrics.plots import plot_comparison, plot_improvement, plot_medians
from metrics.report import comparison_table, improvement_analysis, write_reports_json, write_table_csv
from semantic.cache import SimilarityCache
from semantic.matrix import build_matrix
from semantic.providers import create_similarity_provider
from simulation.benchmark import run_benchmark, run_schedulers
from simulation.export import write_events_csv, write_manifest
from simulation.population import generate_concepts
from simulation.runner import build_world

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROVIDER = 3
EXIT_SCHEDULER = 4

TOP_PAIRS = 10
IMPROVEMENT_REFERENCE = SchedulerId.LECTOR.value


class ExperimentSpec(BaseModel):
    """A JSON experiment file."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    simulation: SimulationConfig = SimulationConfig()
    scheduler_overrides: SchedulerConstants = SchedulerConstants()
    environment_overrides: EnvironmentConstants = EnvironmentConstants()
    output_dir: Path = Path("results")
    plot: bool = False
    seeds: Tuple[int, ...] = Field(default=(), description="Run a multi-seed benchmark when non-empty")
    ablate_semantics: bool = False


def load_experiment(path: str) -> ExperimentSpec:
    try:
        with open(path, 'r', encoding='utf-8') as file:
            return ExperimentSpec.model_validate_json(file.read())
    except OSError as e:
        raise ConfigurationError(f"Cannot read experiment file {path}: {e}") from e
    except ValidationError as e:
        raise ConfigurationError(f"Invalid experiment file {path}: {e}") from e


def _csv_list(raw: str) -> List[str]:
    return [item.strip() for item in raw.split(',') if item.strip()]


def _prepare_output_dir(output_dir: Path) -> Path:
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"Output directory {output_dir} is not writable: {e}") from e
    if not os.access(output_dir, os.W_OK):
        raise ConfigurationError(f"Output directory {output_dir} is not writable")
    return output_dir


def apply_overrides(spec: ExperimentSpec, args: argparse.Namespace) -> ExperimentSpec:
    """Fold command-line flags into the experiment; flags win over the file."""
    simulation = spec.simulation.model_dump()
    if args.seed is not None:
        simulation["seed"] = args.seed
    if args.schedulers:
        simulation["scheduler_ids"] = _csv_list(args.schedulers)
    ablate = spec.ablate_semantics or args.ablate_semantics or spec.simulation.ablate_semantics
    simulation["ablate_semantics"] = ablate
    seeds = tuple(int(s) for s in _csv_list(args.seeds)) if args.seeds else spec.seeds
    try:
        return spec.model_copy(update={
            "simulation": SimulationConfig.model_validate(simulation),
            "plot": spec.plot or args.plot,
            "seeds": seeds,
            "ablate_semantics": ablate,
        })
    except ValidationError as e:
        raise ConfigurationError(f"Invalid command-line override: {e}") from e


def _provider_factory(kind: ProviderKind):
    return lambda groups: create_similarity_provider(kind, groups)


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = apply_overrides(load_experiment(args.config), args)
    cfg = spec.simulation
    output_dir = _prepare_output_dir(Path(spec.output_dir))
    setup_logger(log_file=str(output_dir / "lector.log"))
    jobs = args.jobs or os.cpu_count() or 1
    cache = SimilarityCache(get_cache_path()) if cfg.provider is ProviderKind.LLM else None
    factory = _provider_factory(cfg.provider)
    constants, environment = spec.scheduler_overrides, spec.environment_overrides

    if spec.seeds:
        result = run_benchmark(cfg, spec.seeds, factory, constants, environment, cache, jobs)
        rows = [
            {"seed": seed, **report.model_dump()}
            for seed, reports in result.per_seed.items() for report in reports
        ]
        pd.DataFrame(rows).to_csv(output_dir / "benchmark_reports.csv", index=False, lineterminator='\n')
        medians = pd.DataFrame(
            sorted(result.medians.items(), key=lambda item: (-item[1], item[0])),
            columns=["algorithm", "median_success_rate"],
        )
        medians.to_csv(output_dir / "median_success_rates.csv", index=False, float_format='%.17g', lineterminator='\n')
        if spec.plot:
            plot_medians(result.medians, output_dir / "median_success_rate.svg")
        print(medians.to_string(index=False))
        return EXIT_OK

    world = build_world(cfg, factory, cache, environment, constants.lector.adaptation_rate, jobs)
    try:
        runs = run_schedulers(cfg, world, constants, environment, jobs)
    except SimulationAbortedError as e:
        write_events_csv(e.partial_log, output_dir / f"events_{e.partial_log.label}.partial.csv")
        raise
    finally:
        if cache is not None:
            cache.save_stats()

    for run in runs:
        write_events_csv(run.log, output_dir / f"events_{run.log.label}.csv")
        write_manifest(run.cfg, run.log.label, output_dir / f"manifest_{run.log.label}.json")
    reports = [run.report for run in runs]
    table = comparison_table(reports)
    write_table_csv(table, output_dir / "comparison.csv")
    write_reports_json(reports, output_dir / "comparison.json")
    analysis = None
    if any(r.scheduler_id == IMPROVEMENT_REFERENCE for r in reports):
        analysis = improvement_analysis(reports, IMPROVEMENT_REFERENCE)
        write_table_csv(analysis, output_dir / "improvement.csv")
    if spec.plot:
        plot_comparison(table, output_dir / "plots")
        if analysis is not None and not analysis.empty:
            plot_improvement(analysis, IMPROVEMENT_REFERENCE, output_dir / "plots" / "improvement.svg")
    print(table.to_string(index=False))
    return EXIT_OK


def cmd_matrix(args: argparse.Namespace) -> int:
    output_dir = _prepare_output_dir(Path(args.out))
    setup_logger(log_file=str(output_dir / "lector.log"))
    concepts, groups = load_concept_pool(args.pool)
    provider = create_similarity_provider(ProviderKind(args.provider), groups)
    cache = SimilarityCache(get_cache_path(args.cache))
    try:
        matrix = build_matrix(concepts, provider, cache, jobs=args.jobs)
    finally:
        cache.save_stats()
    matrix.to_csv(output_dir / "interference_matrix.csv")

    lines = [f"{a}\t{b}\t{value:.6f}" for a, b, value in matrix.top_pairs(TOP_PAIRS)]
    (output_dir / "top_pairs.tsv").write_text("first\tsecond\tsimilarity\n" + "\n".join(lines) + "\n", encoding='utf-8')
    print("Most confusable pairs:")
    for line in lines:
        print(f"  {line}")
    if args.stats:
        stats = cache.stats()
        print(f"provider calls: {provider.calls}")
        print(f"cache: {stats.entries} entries, {stats.hits} hits, {stats.misses} misses")
    return EXIT_OK


def cmd_cache(args: argparse.Namespace) -> int:
    setup_logger()
    cache = SimilarityCache(get_cache_path(args.cache))
    if args.action == "clear":
        cache.clear()
    stats = cache.last_run_stats()
    print(f"{stats.entries} entries")
    if args.action == "stats":
        print(f"last run: {stats.hits} hits, {stats.misses} misses")
    return EXIT_OK


def cmd_pool(args: argparse.Namespace) -> int:
    setup_logger()
    try:
        cfg = SimulationConfig(
            n_groups=args.groups,
            group_size=args.group_size,
            seed=args.seed,
            concepts_per_learner=1,
        )
    except ValidationError as e:
        raise ConfigurationError(f"Invalid pool parameters: {e}") from e
    concepts, groups = generate_concepts(cfg, cfg.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dump_concept_pool(concepts, groups, out)
    print(f"Wrote {len(concepts)} concepts in {len(groups)} groups to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lector", description="LECTOR spaced-repetition benchmark")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Run the scheduler comparison from an experiment file")
    simulate.add_argument("--config", required=True, help="Experiment JSON file")
    simulate.add_argument("--seed", type=int, help="Override the experiment seed")
    simulate.add_argument("--jobs", type=int, default=None, help="Worker processes (default: CPU count)")
    simulate.add_argument("--schedulers", help="Comma-separated scheduler ids: " + ",".join(s.value for s in SchedulerId))
    simulate.add_argument("--plot", action="store_true", help="Write SVG bar charts")
    simulate.add_argument("--ablate-semantics", action="store_true", help="Add a LECTOR run without the pressure signal")
    simulate.add_argument("--seeds", help="Comma-separated seeds for a multi-seed benchmark")
    simulate.set_defaults(handler=cmd_simulate)

    matrix = sub.add_parser("matrix", help="Build the interference matrix of a concept pool")
    matrix.add_argument("--pool", required=True, help="Concept pool JSON file")
    matrix.add_argument("--provider", choices=[p.value for p in ProviderKind], default=ProviderKind.OFFLINE.value)
    matrix.add_argument("--stats", action="store_true", help="Print provider-call and cache counters")
    matrix.add_argument("--cache", help="Similarity cache path (default: LECTOR_CACHE_PATH)")
    matrix.add_argument("--out", default="matrix_output", help="Output directory")
    matrix.add_argument("--jobs", type=int, default=1, help="Concurrent similarity lookups")
    matrix.set_defaults(handler=cmd_matrix)

    cache = sub.add_parser("cache", help="Inspect or clear the similarity cache")
    cache.add_argument("action", choices=["stats", "clear"])
    cache.add_argument("--cache", help="Similarity cache path (default: LECTOR_CACHE_PATH)")
    cache.set_defaults(handler=cmd_cache)

    pool = sub.add_parser("pool", help="Write a synthetic concept pool")
    pool.add_argument("--out", required=True, help="Destination JSON file")
    pool.add_argument("--groups", type=int, default=50)
    pool.add_argument("--group-size", type=int, default=5)
    pool.add_argument("--seed", type=int, default=42)
    pool.set_defaults(handler=cmd_pool)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SimilarityError as e:
        print(f"Similarity provider failure: {e}", file=sys.stderr)
        return EXIT_PROVIDER
    except (SchedulerError, SimulationAbortedError) as e:
        print(f"Scheduler error: {e}", file=sys.stderr)
        return EXIT_SCHEDULER


if __name__ == "__main__":
    sys.exit(main())
