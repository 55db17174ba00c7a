from typing import Optional, Type

from langchain_openai import ChatOpenAI

from core.errors import ProviderTransportError
from logger import get_logger
from .base import BaseProvider

logger = get_logger(__name__)


class OpenAIProvider(BaseProvider):
    """Provider for OpenAI chat models through langchain-openai."""

    provider_id = "openai"

    def __init__(self, model_config: Optional[dict] = None, api_key: Optional[str] = None, timeout: float = 30.0, retries: int = 3):
        self.model_config = dict(model_config or {"model": "gpt-5-mini", "temperature": 0.0})
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self._model = None

    def get_model_class(self) -> Type:
        """Returns the ChatOpenAI class."""
        return ChatOpenAI

    @property
    def model_id(self) -> str:
        return str(self.model_config.get("model", "unknown"))

    def _create_model(self):
        config = dict(self.model_config)
        config.setdefault("timeout", self.timeout)
        config.setdefault("max_retries", self.retries)
        if self.api_key:
            config.setdefault("api_key", self.api_key)
        return self.get_model_class()(**config)

    def complete(self, prompt: str) -> str:
        if self._model is None:
            self._model = self._create_model()
        try:
            response = self._model.invoke(prompt)
        except Exception as e:
            logger.warning(f"OpenAI completion failed for model {self.model_id}: {e}")
            raise ProviderTransportError(f"OpenAI completion failed: {e}") from e
        return str(response.content)
