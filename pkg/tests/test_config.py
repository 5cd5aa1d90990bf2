import pytest

from pledgewatch.providers.config import (
    MODE_FIXTURE,
    ProviderSettings,
    load_settings,
    make_providers,
)
from pledgewatch.providers.fixtures import FixtureSearchProvider


def test_defaults_to_fixture_mode(monkeypatch):
    for key in ("PROVIDERS_MODE", "FIXTURES_DIR", "LLM_API_KEY"):
        monkeypatch.delenv(key, raising=False)
    settings = load_settings()
    assert settings.mode == MODE_FIXTURE


def test_config_file_parsed_and_env_wins(tmp_path, monkeypatch):
    config = tmp_path / "pledgewatch.conf"
    config.write_text(
        "# provider settings\n"
        "PROVIDERS_MODE = live\n"
        "LLM_MODEL = from-file\n"
        'SEARCH_API_KEY = "quoted-key"\n',
        encoding="utf-8",
    )
    monkeypatch.setenv("LLM_MODEL", "from-env")
    monkeypatch.delenv("PROVIDERS_MODE", raising=False)
    settings = load_settings(config)
    assert settings.mode == "live"
    assert settings.llm_model == "from-env"
    assert settings.search_api_key == "quoted-key"


def test_overrides_beat_everything(tmp_path, monkeypatch):
    monkeypatch.setenv("PROVIDERS_MODE", "live")
    settings = load_settings(None, mode="fixture", fixtures_dir=str(tmp_path))
    assert settings.mode == "fixture"
    assert settings.fixtures_dir == str(tmp_path)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        ProviderSettings(mode="telepathy")


def test_fixture_mode_requires_directory():
    with pytest.raises(ValueError):
        make_providers(ProviderSettings(mode="fixture", fixtures_dir=""))


def test_make_providers_fixture_bundle(tmp_path):
    (tmp_path / "queries.json").write_text("{}", encoding="utf-8")
    providers = make_providers(ProviderSettings(mode="fixture", fixtures_dir=str(tmp_path)))
    assert isinstance(providers.search, FixtureSearchProvider)
