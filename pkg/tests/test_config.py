import json
import logging

import pytest

from dipelab.config import (
    Settings,
    configure_logging,
    get_env_var,
    get_settings,
    load_command_defaults,
    reset_settings,
)
from dipelab.errors import ArgumentError, DipeError, SizeError, VerificationError


class TestSettings:
    def test_defaults(self):
        settings = get_settings()
        assert settings.dense_cap == 12
        assert settings.generic_b_cap == 3
        assert settings.api_prefix == "/api"
        assert settings.config_path is None

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("DIPE_WORKERS", "4")
        monkeypatch.setenv("DIPE_GENERIC_B_CAP", "5")
        reset_settings()
        settings = get_settings()
        assert settings.workers == 4 and settings.generic_b_cap == 5

    def test_cors_origins(self, monkeypatch):
        assert get_settings().cors_origins == ["*"]
        monkeypatch.setenv("DIPE_CORS_ORIGINS", "http://localhost:8888, https://lab.example.org")
        reset_settings()
        assert get_settings().cors_origins == ["http://localhost:8888", "https://lab.example.org"]

    def test_docs_path_follows_prefix(self, monkeypatch):
        assert get_settings().docs_path == "/api/docs"
        monkeypatch.setenv("API_PREFIX", "/lab/")
        reset_settings()
        assert get_settings().docs_path == "/lab/docs"

    def test_singleton(self):
        assert get_settings() is get_settings()

    def test_invalid_environment(self, monkeypatch):
        monkeypatch.setenv("DIPE_DENSE_CAP", "40")
        with pytest.raises(ValueError):
            Settings.from_env()

    def test_get_env_var(self, monkeypatch):
        monkeypatch.setenv("DIPE_TEST_KEY", "x")
        assert get_env_var("DIPE_TEST_KEY") == "x"
        assert get_env_var("DIPE_ABSENT_KEY", "fallback") == "fallback"
        with pytest.raises(ValueError):
            get_env_var("DIPE_ABSENT_KEY", required=True)


class TestCommandDefaults:
    def test_empty_path(self):
        assert load_command_defaults(None) == {}

    def test_load(self, tmp_path):
        path = tmp_path / "defaults.json"
        path.write_text(json.dumps({"simulate": {"nu": 10}}))
        assert load_command_defaults(str(path)) == {"simulate": {"nu": 10}}

    @pytest.mark.parametrize("content", ["[]", '{"plan": 1}', "{"])
    def test_bad_content(self, tmp_path, content):
        path = tmp_path / "defaults.json"
        path.write_text(content)
        with pytest.raises(ArgumentError):
            load_command_defaults(str(path))

    def test_missing(self, tmp_path):
        with pytest.raises(ArgumentError):
            load_command_defaults(str(tmp_path / "none.json"))


class TestLogging:
    def test_handler_installed_once(self):
        logger = configure_logging("DEBUG")
        configure_logging("WARNING")
        marked = [h for h in logger.handlers if getattr(h, "_dipelab", False)]
        assert len(marked) == 1
        assert logger.level == logging.WARNING

    def test_level_from_environment(self, monkeypatch):
        monkeypatch.setenv("DIPE_LOG_LEVEL", "error")
        reset_settings()
        assert configure_logging().level == logging.ERROR

    def test_unknown_level(self):
        with pytest.raises(ValueError):
            configure_logging("LOUD")


class TestErrors:
    @pytest.mark.parametrize(
        "cls, code",
        [(SizeError, "SIZE_LIMIT"), (ArgumentError, "INVALID_ARGUMENT"), (VerificationError, "VERIFICATION_FAILED")],
    )
    def test_codes(self, cls, code):
        error = cls("boom", {"k": 1})
        assert error.code == code
        assert isinstance(error, DipeError) and isinstance(error, ValueError)
        assert error.message == "boom" and error.details == {"k": 1}
        assert str(error) == "boom"
