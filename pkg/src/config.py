import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parents[1]
LLM_MODELS_PATH = PROJECT_ROOT / 'config' / 'llm_models.yaml'
DEFAULT_CACHE_PATH = '.lector_cache/similarity.jsonl'


@dataclass(frozen=True)
class LLMSettings:
    """Connection settings for the LLM similarity provider."""

    endpoint: Optional[str]
    model: str
    api_key: Optional[str]
    timeout: float = 30.0
    retries: int = 3
    concurrency: int = 4


def _env_number(name: str, default, cast):
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return cast(raw)
    except ValueError as e:
        raise ValueError(f"Environment variable {name} must be a number, got {raw!r}") from e


def get_llm_settings() -> LLMSettings:
    """Read the LECTOR_LLM_* environment variables.

    The environment is re-read on every call so tests and the CLI see changes
    made after import.
    """
    return LLMSettings(
        endpoint=os.getenv('LECTOR_LLM_ENDPOINT'),
        model=os.getenv('LECTOR_LLM_MODEL') or LLM_MODELS.get_model_config('semantic_scorer').get('model', 'gpt-5-mini'),
        api_key=os.getenv('LECTOR_LLM_KEY'),
        timeout=_env_number('LECTOR_LLM_TIMEOUT', 30.0, float),
        retries=_env_number('LECTOR_LLM_RETRIES', 3, int),
        concurrency=_env_number('LECTOR_LLM_CONCURRENCY', 4, int),
    )


def get_cache_path(override: Optional[str] = None) -> Path:
    """Resolve the similarity cache path: explicit override, then LECTOR_CACHE_PATH."""
    return Path(override or os.getenv('LECTOR_CACHE_PATH') or DEFAULT_CACHE_PATH)


class LLMModelsConfig:
    """Configuration class for loading the completion backends from YAML file."""

    def __init__(self, config_path: Path = LLM_MODELS_PATH):
        """Initialize the configuration by loading the YAML file.

        A missing file leaves an empty configuration; callers fall back to the
        HTTP provider defaults.

        Args:
            config_path: Path to the YAML configuration file.
        """
        try:
            with open(config_path, 'r', encoding='utf-8') as file:
                self._config = yaml.safe_load(file) or {}
        except FileNotFoundError:
            self._config = {}

    @property
    def backends(self) -> dict:
        """Get every configured backend."""
        return self._config

    def get_backend_config(self, name: str) -> dict:
        """Get configuration for a specific backend, or an empty dict."""
        return self.backends.get(name, {})

    def get_provider(self, name: str) -> Optional[str]:
        """Get the provider name for a specific backend."""
        return self.get_backend_config(name).get('provider')

    def get_model_config(self, name: str) -> dict:
        """Get the model configuration for a specific backend."""
        return self.get_backend_config(name).get('model_config', {})


# Create global instance
LLM_MODELS = LLMModelsConfig()
