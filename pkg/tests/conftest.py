import pytest

from core.types import Concept, SemanticGroup, SimulationConfig, initial_state
from semantic.providers import OfflineSimilarityProvider


def _concept(cid: str, term: str, group_id: str = "g0", difficulty: float = 0.5) -> Concept:
    return Concept(id=cid, term=term, gloss=f"gloss of {term}", group_id=group_id, difficulty=difficulty)


@pytest.fixture
def cfg() -> SimulationConfig:
    return SimulationConfig()


@pytest.fixture
def small_cfg() -> SimulationConfig:
    return SimulationConfig(n_learners=3, n_days=12, concepts_per_learner=4, n_groups=4, seed=7)


@pytest.fixture
def fresh_state():
    return initial_state(0.5)


@pytest.fixture
def pool():
    concepts = [
        _concept("c0", "banana", "g0"),
        _concept("c1", "bananas", "g0"),
        _concept("c2", "bandana", "g0"),
        _concept("c3", "xylophone", "g1"),
        _concept("c4", "xylograph", "g1"),
    ]
    groups = [
        SemanticGroup(group_id="g0", members=("c0", "c1", "c2"), base_similarity=0.8),
        SemanticGroup(group_id="g1", members=("c3", "c4"), base_similarity=0.6),
    ]
    return concepts, groups


@pytest.fixture
def offline_provider(pool):
    return OfflineSimilarityProvider(pool[1])


class ConstantProvider(OfflineSimilarityProvider):
    """Offline-tagged provider returning fixed scores per unordered pair."""

    def __init__(self, scores=None, default: float = 0.5):
        super().__init__([])
        self.scores = {frozenset(k): v for k, v in (scores or {}).items()}
        self.default = default

    @property
    def model_id(self) -> str:
        return "constant"

    def _score(self, a, b):
        return self.scores.get(frozenset((a.id, b.id)), self.default)


@pytest.fixture
def constant_provider():
    return ConstantProvider


@pytest.fixture
def make_concept():
    return _concept
