"""Prompt construction and reply parsing for LLM similarity scoring."""

import re
from string import Formatter

from pydantic import BaseModel, ConfigDict

from core.errors import ConfigurationError, SimilarityOutOfRangeError, SimilarityParseError
from core.types import Concept

PLACEHOLDERS = ("first", "second")

DEFAULT_TEMPLATE = (
    "You are helping a student prepare for a vocabulary examination.\n"
    "Rate the risk that a learner confuses the following two concepts when "
    "studying them close together in time.\n"
    "Concept A: {first}\n"
    "Concept B: {second}\n"
)
DEFAULT_RESPONSE_SCHEMA = (
    "Answer with a single decimal between 0 and 1, where 0 means no confusion "
    "risk and 1 means the concepts are almost always confused. Reply with the number only."
)

_DECIMAL = re.compile(r"[-+]?(?:\d+(?:\.\d+)?|\.\d+)(?!\.\s*\d)")


class PromptSpec(BaseModel):
    """Template with `{first}` / `{second}` placeholders plus the reply instruction."""
    model_config = ConfigDict(frozen=True)

    template: str = DEFAULT_TEMPLATE
    response_schema: str = DEFAULT_RESPONSE_SCHEMA

    def placeholder_names(self) -> list:
        return [name for _, name, _, _ in Formatter().parse(self.template) if name is not None]


def _render(concept: Concept) -> str:
    return f"{concept.term} ({concept.gloss})"


def construct_prompt(a: Concept, b: Concept, spec: PromptSpec = PromptSpec()) -> str:
    """Render the confusion-risk prompt for a concept pair.

    Raises:
        ConfigurationError: unless the template holds exactly the two placeholders once each.
    """
    try:
        names = spec.placeholder_names()
    except ValueError as e:
        raise ConfigurationError(f"Malformed prompt template: {e}") from e
    if sorted(names) != sorted(PLACEHOLDERS):
        raise ConfigurationError(
            f"Prompt template must contain exactly {{first}} and {{second}}, found {names}"
        )
    body = spec.template.format(first=_render(a), second=_render(b))
    return f"{body}\n{spec.response_schema}"


def parse_similarity_response(raw: str) -> float:
    """Extract the first decimal number of a reply; it must lie in [0, 1].

    Out-of-range values are errors, never clamped.
    """
    match = _DECIMAL.search(raw or "")
    if match is None:
        raise SimilarityParseError(raw or "")
    value = float(match.group(0))
    if not 0.0 <= value <= 1.0:
        raise SimilarityOutOfRangeError(value, raw)
    return value
