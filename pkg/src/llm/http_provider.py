"""HTTP completion provider: POST {"model", "prompt"} and read {"text"}."""

import time
from typing import Any, Callable, Dict, Optional

import httpx

from core.errors import ProviderTransportError
from logger import get_logger
from .base import BaseProvider

logger = get_logger(__name__)

RETRYABLE_STATUS = {408, 429}


class HttpProvider(BaseProvider):
    """Completion provider speaking a minimal JSON protocol over HTTP."""

    provider_id = "http"

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: Optional[str] = None,
        timeout: float = 30.0,
        retries: int = 3,
        backoff_factor: float = 0.5,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        """
        Args:
            endpoint: URL receiving the POST requests.
            model: Model name sent with every prompt.
            api_key: Optional bearer token.
            timeout: Per-request timeout in seconds.
            retries: Retries after the first attempt; waits grow as backoff_factor * 2**attempt.
            transport: Optional httpx transport (tests use httpx.MockTransport).
            sleep: Wait function between retries.
        """
        self.endpoint = endpoint
        self.model = model
        self.retries = retries
        self.backoff_factor = backoff_factor
        self._sleep = sleep
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self.client = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    @property
    def model_id(self) -> str:
        return self.model

    def _post(self, payload: Dict[str, Any]) -> httpx.Response:
        last_error = "no attempt made"
        for attempt in range(self.retries + 1):  # first try + N retries
            try:
                response = self.client.post(self.endpoint, json=payload)
                if response.status_code < 500 and response.status_code not in RETRYABLE_STATUS:
                    return response
                last_error = f"HTTP {response.status_code}"
            except httpx.HTTPError as e:
                last_error = f"{type(e).__name__}: {e}"
            if attempt < self.retries:
                wait = self.backoff_factor * (2 ** attempt)
                logger.warning(f"LLM request failed ({last_error}), retry {attempt + 1}/{self.retries} in {wait:.1f}s")
                self._sleep(wait)
        raise ProviderTransportError(f"LLM endpoint failed after {self.retries} retries: {last_error}")

    def complete(self, prompt: str) -> str:
        response = self._post({"model": self.model, "prompt": prompt})
        if response.status_code >= 400:
            raise ProviderTransportError(f"LLM endpoint rejected the request: HTTP {response.status_code}")
        try:
            body = response.json()
            text = body["text"]
        except (ValueError, KeyError, TypeError) as e:
            raise ProviderTransportError(f"Malformed LLM response: {response.text[:200]!r}") from e
        return str(text)

    def close(self) -> None:
        self.client.close()
