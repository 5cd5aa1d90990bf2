from .base import (
    EmbeddingProvider,
    EmbeddingVector,
    LlmProvider,
    LlmRequest,
    LlmResponse,
    ScrapedDocument,
    ScrapeProvider,
    SearchHit,
    SearchProvider,
    with_retries,
)
from .config import (
    MODE_FIXTURE,
    MODE_LIVE,
    Providers,
    ProviderSettings,
    load_settings,
    make_providers,
)
from .fixtures import (
    FixtureEmbeddingProvider,
    FixtureLlmProvider,
    FixtureMissError,
    FixtureScrapeProvider,
    FixtureSearchProvider,
    completion_key,
)

__all__ = [
    "EmbeddingProvider",
    "EmbeddingVector",
    "LlmProvider",
    "LlmRequest",
    "LlmResponse",
    "ScrapedDocument",
    "ScrapeProvider",
    "SearchHit",
    "SearchProvider",
    "with_retries",
    "MODE_FIXTURE",
    "MODE_LIVE",
    "Providers",
    "ProviderSettings",
    "load_settings",
    "make_providers",
    "FixtureEmbeddingProvider",
    "FixtureLlmProvider",
    "FixtureMissError",
    "FixtureScrapeProvider",
    "FixtureSearchProvider",
    "completion_key",
]
