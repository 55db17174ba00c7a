from typing import Optional

from config import LLM_MODELS, LLMSettings, get_llm_settings
from core.errors import ConfigurationError
from logger import get_logger
from .base import BaseProvider
from .factory import ProviderFactory

SEMANTIC_SCORER = "semantic_scorer"


class LanguageModelManager:
    def __init__(self, settings: Optional[LLMSettings] = None):
        """Initialize the language model manager"""
        self.logger = get_logger(__name__)
        self.provider_factory = ProviderFactory()
        self.settings = settings or get_llm_settings()

    def get_provider(self, backend_name: str = SEMANTIC_SCORER) -> BaseProvider:
        """Build the completion provider configured for the given backend."""
        provider_name = LLM_MODELS.get_provider(backend_name) or "http"
        model_config = dict(self.get_model_config(backend_name))
        if self.settings.model:
            model_config["model"] = self.settings.model

        if provider_name == "http":
            if not self.settings.endpoint:
                raise ConfigurationError("LECTOR_LLM_ENDPOINT must be set to use the llm provider")
            kwargs = dict(
                endpoint=self.settings.endpoint,
                model=model_config["model"],
                api_key=self.settings.api_key,
                timeout=self.settings.timeout,
                retries=self.settings.retries,
            )
        else:
            kwargs = dict(
                model_config=model_config,
                api_key=self.settings.api_key,
                timeout=self.settings.timeout,
                retries=self.settings.retries,
            )
        self.logger.info(f"Using {provider_name} completion provider with model {model_config.get('model')}")
        return self.provider_factory.create_provider(provider_name, **kwargs)

    def get_model_config(self, backend_name: str = SEMANTIC_SCORER) -> dict:
        """Get the model configuration for the given backend."""
        return LLM_MODELS.get_model_config(backend_name)
