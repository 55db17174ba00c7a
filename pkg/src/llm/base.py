from abc import ABC, abstractmethod


class BaseProvider(ABC):
    """An abstract base class for LLM completion providers."""

    provider_id: str = "base"

    @property
    @abstractmethod
    def model_id(self) -> str:
        """Name of the model answering the prompts (part of the cache key)."""

    @abstractmethod
    def complete(self, prompt: str) -> str:
        """
        Sends one prompt and returns the raw completion text.

        Raises:
            ProviderTransportError: if the backend cannot be reached after all retries.
        """
