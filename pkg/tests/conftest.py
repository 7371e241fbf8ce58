import numpy as np
import pytest

from dipelab.config import reset_settings

ENV_KEYS = (
    "DIPE_DENSE_CAP",
    "DIPE_TENSOR_CAP",
    "DIPE_GENERIC_B_CAP",
    "DIPE_TRANSFER_CAP",
    "DIPE_WORKERS",
    "DIPE_LOG_LEVEL",
    "DIPE_CONFIG",
    "API_PREFIX",
    "PORT",
    "DIPE_CORS_ORIGINS",
)


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
