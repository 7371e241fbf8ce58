# This module holds the runtime configuration of the laboratory
# Values are read from the environment, optionally seeded from a .env file at the repo root
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import ArgumentError

# This loads environment variables from the .env file in the parent directory
ROOT_ENV = Path(__file__).resolve().parents[1] / ".env"
load_dotenv(dotenv_path=ROOT_ENV, override=False)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# This function safely retrieves environment variables with optional defaults
def get_env_var(key: str, default: Optional[str] = None, required: bool = False) -> Optional[str]:
    value = os.getenv(key, default)
    if required and not value:
        raise ValueError(f"Required environment variable {key} is not set")
    return value


# This model collects every size cap and runtime knob in one validated place
class Settings(BaseModel):
    dense_cap: int = Field(12, ge=1, le=16, description="Max qubits for dense states and Pauli vectors")
    tensor_cap: int = Field(2**16, ge=2, description="Max matrix dimension produced by tensor()")
    generic_b_cap: int = Field(3, ge=1, le=6, description="Max n for the generic Haar fourth-moment contraction")
    transfer_cap: int = Field(6, ge=1, le=7, description="Hard max n for transfer-tensor contractions")
    workers: int = Field(1, ge=1, le=64, description="Threads used for block simulation and sweeps")
    log_level: str = Field("INFO", description="Logging level name")
    config_path: Optional[str] = Field(None, description="JSON file preloading CLI defaults")
    api_prefix: str = Field("/api", description="Prefix of the HTTP routes")
    port: int = Field(8000, ge=1, le=65535)
    cors_origins: List[str] = Field(default_factory=lambda: ["*"], description="Origins allowed by the CORS middleware")

    # This accepts the comma-separated form used in the environment
    @field_validator("cors_origins", mode="before")
    @classmethod
    def _split_origins(cls, value):
        if isinstance(value, str):
            value = [v.strip() for v in value.split(",") if v.strip()]
        return value or ["*"]

    @property
    def docs_path(self) -> str:
        return f"{self.api_prefix.rstrip('/')}/docs"

    @classmethod
    def from_env(cls) -> "Settings":
        raw = {
            "dense_cap": get_env_var("DIPE_DENSE_CAP", "12"),
            "tensor_cap": get_env_var("DIPE_TENSOR_CAP", str(2**16)),
            "generic_b_cap": get_env_var("DIPE_GENERIC_B_CAP", "3"),
            "transfer_cap": get_env_var("DIPE_TRANSFER_CAP", "6"),
            "workers": get_env_var("DIPE_WORKERS", "1"),
            "log_level": get_env_var("DIPE_LOG_LEVEL", "INFO"),
            "config_path": get_env_var("DIPE_CONFIG"),
            "api_prefix": get_env_var("API_PREFIX", "/api"),
            "port": get_env_var("PORT", "8000"),
            "cors_origins": get_env_var("DIPE_CORS_ORIGINS", "*"),
        }
        try:
            return cls(**raw)
        except ValidationError as e:
            raise ValueError(f"Invalid environment configuration: {e}") from e


# ==================== SINGLETON ACCESS ====================

_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None


# This installs one stderr handler on the package logger (idempotent)
def configure_logging(level: Optional[str] = None) -> logging.Logger:
    logger = logging.getLogger("dipelab")
    logger.setLevel((level or get_settings().log_level).upper())
    if not any(getattr(h, "_dipelab", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._dipelab = True
        logger.addHandler(handler)
    return logger


# This reads per-subcommand CLI defaults from a JSON file
# Expected layout: {"simulate": {"nu": 1000, "seed": 7}, "plan": {...}}
def load_command_defaults(path: Optional[str]) -> Dict[str, Dict[str, Any]]:
    if not path:
        return {}
    file_path = Path(path)
    if not file_path.is_file():
        raise ArgumentError(f"Config file not found: {path}")
    try:
        data = json.loads(file_path.read_text())
    except json.JSONDecodeError as e:
        raise ArgumentError(f"Config file is not valid JSON: {path}", str(e)) from e
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise ArgumentError("Config file must map subcommand names to objects of flag defaults")
    return data
