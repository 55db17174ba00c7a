"""Interchangeable similarity providers: deterministic offline scorer and LLM scorer."""

import threading
from abc import ABC, abstractmethod
from collections import Counter
from typing import Iterable, Mapping, Optional

from core.errors import SimilarityOutOfRangeError, SimilarityParseError
from core.types import Concept, ProviderKind, SemanticGroup, clamp_unit
from llm.base import BaseProvider
from logger import get_logger
from semantic.prompts import PromptSpec, construct_prompt, parse_similarity_response

logger = get_logger(__name__)


def _trigrams(term: str) -> Counter:
    text = term.lower()
    return Counter(text[i:i + 3] for i in range(len(text) - 2))


def trigram_jaccard(a: str, b: str) -> float:
    """Jaccard similarity of the character-trigram multisets of two lowercase terms."""
    grams_a, grams_b = _trigrams(a), _trigrams(b)
    union = sum((grams_a | grams_b).values())
    if union == 0:
        return 1.0 if a.lower() == b.lower() else 0.0
    return sum((grams_a & grams_b).values()) / union


def offline_similarity(a: Concept, b: Concept, group_similarity: Mapping[str, float]) -> float:
    """Group prior refined by term overlap.

    group_term is the shared group's base similarity (0 across groups); the
    trigram overlap fills half of the remaining headroom.
    """
    group_term = group_similarity.get(a.group_id, 0.0) if a.group_id == b.group_id else 0.0
    return clamp_unit(group_term + 0.5 * trigram_jaccard(a.term, b.term) * (1.0 - group_term))


class SimilarityProvider(ABC):
    """Scores the confusion risk of a concept pair; counts its own calls."""

    tag: ProviderKind

    def __init__(self):
        self._lock = threading.Lock()
        self.calls = 0

    @property
    @abstractmethod
    def model_id(self) -> str:
        """Model name stored alongside cached scores."""

    @abstractmethod
    def _score(self, a: Concept, b: Concept) -> float:
        ...

    def score(self, a: Concept, b: Concept) -> float:
        with self._lock:
            self.calls += 1
        logger.debug(f"{self.tag.value} provider scoring ({a.id}, {b.id})")
        return self._score(a, b)


class OfflineSimilarityProvider(SimilarityProvider):
    """Deterministic scorer for tests and network-free runs."""

    tag = ProviderKind.OFFLINE

    def __init__(self, groups: Iterable[SemanticGroup]):
        super().__init__()
        self.group_similarity = {g.group_id: g.base_similarity for g in groups}

    @property
    def model_id(self) -> str:
        return "group-trigram-v1"

    def _score(self, a: Concept, b: Concept) -> float:
        return offline_similarity(a, b, self.group_similarity)


class LLMSimilarityProvider(SimilarityProvider):
    """Asks a completion backend for a confusion-risk decimal.

    Replies that fail to parse or fall outside [0, 1] are re-prompted up to
    `max_reprompts` times; the last error is then raised. At most
    `concurrency` requests are outstanding at once.
    """

    tag = ProviderKind.LLM

    def __init__(
        self,
        completion: BaseProvider,
        prompt_spec: Optional[PromptSpec] = None,
        max_reprompts: int = 2,
        concurrency: int = 4,
    ):
        super().__init__()
        self.completion = completion
        self.prompt_spec = prompt_spec or PromptSpec()
        self.max_reprompts = max_reprompts
        self._slots = threading.BoundedSemaphore(max(1, concurrency))

    @property
    def model_id(self) -> str:
        return self.completion.model_id

    def _score(self, a: Concept, b: Concept) -> float:
        prompt = construct_prompt(a, b, self.prompt_spec)
        last_error = None
        for attempt in range(self.max_reprompts + 1):
            with self._slots:
                raw = self.completion.complete(prompt)
            try:
                return parse_similarity_response(raw)
            except (SimilarityParseError, SimilarityOutOfRangeError) as e:
                last_error = e
                if attempt < self.max_reprompts:
                    logger.warning(f"Re-prompting pair ({a.id}, {b.id}) after non-compliant reply: {e}")
        raise last_error


def create_similarity_provider(
    kind: ProviderKind,
    groups: Iterable[SemanticGroup],
    completion: Optional[BaseProvider] = None,
    concurrency: int = 4,
) -> SimilarityProvider:
    """Build the similarity provider selected by `kind`.

    The LLM provider needs a completion backend; when none is given the one
    configured for the semantic scorer is created.
    """
    if ProviderKind(kind) is ProviderKind.OFFLINE:
        return OfflineSimilarityProvider(groups)
    if completion is None:
        from llm.language_models import LanguageModelManager
        manager = LanguageModelManager()
        completion = manager.get_provider()
        concurrency = manager.settings.concurrency
    return LLMSimilarityProvider(completion, concurrency=concurrency)
