from .base import BaseProvider
from .http_provider import HttpProvider
from .openai_provider import OpenAIProvider

BACKENDS: dict[str, type[BaseProvider]] = {
    "http": HttpProvider,
    "openai": OpenAIProvider,
}


class ProviderFactory:
    """Builds completion backends by the name used in llm_models.yaml."""

    def create_provider(self, provider_name: str, **kwargs) -> BaseProvider:
        """
        Args:
            provider_name: Backend name, one of BACKENDS.
            **kwargs: Connection settings passed to the backend constructor.

        Raises:
            NotImplementedError: For a backend name with no implementation.
        """
        backend = BACKENDS.get(provider_name)
        if backend is None:
            raise NotImplementedError(f"No completion backend named '{provider_name}'.")
        return backend(**kwargs)
