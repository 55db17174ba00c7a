"""
Synthetic learners and concept pool.

Every random draw comes from a numpy Generator seeded by a SeedSequence
derived from the master seed and a stream number, so the population, the
pool and each learner's review stream are independent of one another.
"""

import string
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import Field

from core.constants import EnvironmentConstants
from core.errors import ConfigurationError
from core.types import Concept, FrozenModel, LearnerProfile, SemanticGroup, SimulationConfig

STREAM_POPULATION = 0
STREAM_LEARNER = 1
STREAM_POOL = 2
STREAM_ASSIGNMENT = 3

SUFFIX_LENGTH = 3


def stream_rng(seed: int, stream: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, stream, key...)."""
    return np.random.default_rng(np.random.SeedSequence([seed, stream, *key]))


class LearnerTraits(FrozenModel):
    """Latent learner characteristics, hidden from every scheduler."""
    ability: float = Field(..., ge=0.0, le=1.0)
    speed: float = Field(..., ge=0.0, le=1.0)
    base_retention: float = Field(..., ge=0.0, le=1.0)
    confusability: float = Field(..., ge=0.0, le=1.0)


def generate_population(
    cfg: SimulationConfig,
    seed: int,
    env: EnvironmentConstants = EnvironmentConstants(),
    adaptation_rate: float = 0.2,
) -> List[Tuple[LearnerTraits, LearnerProfile]]:
    """Draw n_learners trait vectors from Beta(alpha, beta) per field.

    Every learner starts from the neutral profile (0.5 in each field).
    """
    rng = stream_rng(seed, STREAM_POPULATION)
    draws = rng.beta(env.trait_alpha, env.trait_beta, size=(cfg.n_learners, 4))
    return [
        (
            LearnerTraits(ability=float(a), speed=float(s), base_retention=float(r), confusability=float(c)),
            LearnerProfile(adaptation_rate=adaptation_rate),
        )
        for a, s, r, c in draws
    ]


def _random_letters(rng: np.random.Generator, n: int) -> str:
    return ''.join(string.ascii_lowercase[i] for i in rng.integers(0, 26, size=n))


def generate_concepts(
    cfg: SimulationConfig,
    seed: int,
    env: EnvironmentConstants = EnvironmentConstants(),
) -> Tuple[List[Concept], List[SemanticGroup]]:
    """Build n_groups groups of group_size concepts.

    Members of a group share a random stem and differ by a random suffix, so the
    offline trigram score is high inside a group and low across groups.
    """
    rng = stream_rng(seed, STREAM_POOL)
    id_width = len(str(cfg.n_groups * cfg.group_size - 1))
    group_width = len(str(cfg.n_groups - 1))
    sim_lo, sim_hi = env.base_similarity_range
    diff_lo, diff_hi = env.difficulty_range

    concepts: List[Concept] = []
    groups: List[SemanticGroup] = []
    for g in range(cfg.n_groups):
        group_id = f"g{g:0{group_width}d}"
        stem = _random_letters(rng, env.stem_length)
        suffixes: List[str] = []
        while len(suffixes) < cfg.group_size:
            suffix = _random_letters(rng, SUFFIX_LENGTH)
            if suffix not in suffixes:
                suffixes.append(suffix)
        members = []
        for m, suffix in enumerate(suffixes):
            concept = Concept(
                id=f"c{g * cfg.group_size + m:0{id_width}d}",
                term=stem + suffix,
                gloss=f"synthetic concept {m + 1} of group {group_id}",
                group_id=group_id,
                difficulty=float(rng.uniform(diff_lo, diff_hi)),
            )
            concepts.append(concept)
            members.append(concept.id)
        groups.append(SemanticGroup(
            group_id=group_id,
            members=tuple(members),
            base_similarity=float(rng.uniform(sim_lo, sim_hi)),
        ))
    return concepts, groups


def assign_concepts(
    concepts: Sequence[Concept],
    groups: Sequence[SemanticGroup],
    k: int,
    rng: np.random.Generator,
    max_per_group: int = 2,
) -> List[Concept]:
    """Stratified sample of k concepts without replacement.

    Visits groups in shuffled order and takes up to `max_per_group` members
    from each, so a learner holds ceil(k / max_per_group) groups with
    same-group pairs among them. When short groups leave a remainder, later
    groups in the order fill it.

    Raises:
        ConfigurationError: if k exceeds what the pool can supply.
    """
    by_id = {c.id: c for c in concepts}
    capacity = sum(min(len(g.members), max_per_group) for g in groups)
    if k > capacity:
        raise ConfigurationError(
            f"concepts_per_learner={k} exceeds the pool's capacity of {capacity} "
            f"({len(groups)} groups, at most {max_per_group} per group)"
        )
    picked: List[Concept] = []
    for i in rng.permutation(len(groups)):
        members = rng.permutation(groups[int(i)].members)
        for member in members[:min(max_per_group, k - len(picked))]:
            picked.append(by_id[str(member)])
        if len(picked) == k:
            break
    return picked
