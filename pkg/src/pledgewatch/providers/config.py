"""Provider wiring from environment variables and an optional config file.

The config file is flat ``KEY=value`` lines (comments with #), mirroring
the environment variable names; the environment wins on conflict.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .base import EmbeddingProvider, LlmProvider, ScrapeProvider, SearchProvider
from .fixtures import (
    FixtureEmbeddingProvider,
    FixtureLlmProvider,
    FixtureScrapeProvider,
    FixtureSearchProvider,
)

MODE_LIVE = "live"
MODE_FIXTURE = "fixture"

_KEYS = (
    "PROVIDERS_MODE",
    "FIXTURES_DIR",
    "SEARCH_API_KEY",
    "SEARCH_ENGINE_ID",
    "SEARCH_ENDPOINT",
    "LLM_API_KEY",
    "LLM_MODEL",
    "LLM_ENDPOINT",
    "EMBED_MODEL",
    "EMBED_ENDPOINT",
    "DATA_DIR",
    "CORPUS_PATH",
)


@dataclass
class ProviderSettings:
    mode: str = MODE_FIXTURE
    fixtures_dir: str = ""
    search_api_key: str = ""
    search_engine_id: str = ""
    search_endpoint: str = ""
    llm_api_key: str = ""
    llm_model: str = ""
    llm_endpoint: str = ""
    embed_model: str = ""
    embed_endpoint: str = ""
    data_dir: str = ""
    corpus_path: str = ""

    def __post_init__(self):
        if self.mode not in (MODE_LIVE, MODE_FIXTURE):
            raise ValueError(f"providers mode must be live or fixture, got {self.mode!r}")


def _parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            continue
        key, _, value = line.partition("=")
        values[key.strip().upper()] = value.strip().strip("\"'")
    return values


def load_settings(config_path: str | Path | None = None, **overrides) -> ProviderSettings:
    values = {key: "" for key in _KEYS}
    if config_path:
        values.update(_parse_config_file(config_path))
    for key in _KEYS:
        env = os.environ.get(key)
        if env is not None:
            values[key] = env
    settings = ProviderSettings(
        mode=values["PROVIDERS_MODE"] or MODE_FIXTURE,
        fixtures_dir=values["FIXTURES_DIR"],
        search_api_key=values["SEARCH_API_KEY"],
        search_engine_id=values["SEARCH_ENGINE_ID"],
        search_endpoint=values["SEARCH_ENDPOINT"],
        llm_api_key=values["LLM_API_KEY"],
        llm_model=values["LLM_MODEL"],
        llm_endpoint=values["LLM_ENDPOINT"],
        embed_model=values["EMBED_MODEL"],
        embed_endpoint=values["EMBED_ENDPOINT"],
        data_dir=values["DATA_DIR"],
        corpus_path=values["CORPUS_PATH"],
    )
    for name, value in overrides.items():
        if value is not None:
            setattr(settings, name, value)
    return settings


@dataclass
class Providers:
    search: SearchProvider
    scraper: ScrapeProvider
    llm: LlmProvider
    embedder: EmbeddingProvider


def make_providers(settings: ProviderSettings) -> Providers:
    if settings.mode == MODE_FIXTURE:
        fixtures_dir = settings.fixtures_dir
        if not fixtures_dir:
            raise ValueError("fixture mode requires FIXTURES_DIR")
        return Providers(
            search=FixtureSearchProvider(fixtures_dir),
            scraper=FixtureScrapeProvider(fixtures_dir),
            llm=FixtureLlmProvider(fixtures_dir),
            embedder=FixtureEmbeddingProvider(),
        )

    from .live import (
        LiveEmbeddingProvider,
        LiveLlmProvider,
        LiveScrapeProvider,
        LiveSearchProvider,
    )

    search_kwargs = {"api_key": settings.search_api_key, "engine_id": settings.search_engine_id}
    if settings.search_endpoint:
        search_kwargs["endpoint"] = settings.search_endpoint
    llm_kwargs = {"api_key": settings.llm_api_key, "model": settings.llm_model}
    if settings.llm_endpoint:
        llm_kwargs["endpoint"] = settings.llm_endpoint
    embed_kwargs = {"api_key": settings.llm_api_key, "model": settings.embed_model}
    if settings.embed_endpoint:
        embed_kwargs["endpoint"] = settings.embed_endpoint
    return Providers(
        search=LiveSearchProvider(**search_kwargs),
        scraper=LiveScrapeProvider(),
        llm=LiveLlmProvider(**llm_kwargs),
        embedder=LiveEmbeddingProvider(**embed_kwargs),
    )
