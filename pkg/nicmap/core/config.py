from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional
from enum import Enum
from pathlib import Path
import os


class Environment(str, Enum):
    DEVELOPMENT = "development"
    STAGING = "staging"
    PRODUCTION = "production"
    TESTING = "testing"


def detect_env_file() -> str:
    """Pick the env file: ENV_FILE wins, then .env.docker inside a container, then .env."""
    if os.getenv("ENV_FILE"):
        return os.environ["ENV_FILE"]
    if Path("/.dockerenv").exists():
        return ".env.docker"
    return ".env"


class BaseConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=detect_env_file(),
        case_sensitive=True,
        extra="ignore",
    )

    # === Application ===
    APP_NAME: str = "nicmap"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Contention-aware process mapping and NIC/memory/cache queueing simulator"
    ENVIRONMENT: Environment = Environment.DEVELOPMENT
    DEBUG: bool = False

    # === Logging ===
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"
    ENABLE_FILE_LOGGING: bool = False

    # === Experiments ===
    OUTPUT_DIR: str = "results"
    MAX_WORKERS: Optional[int] = None
    KL_RESTARTS: int = 16
    DEFAULT_CLUSTER_FILE: Optional[str] = None


class DevelopmentConfig(BaseConfig):
    DEBUG: bool = True
    LOG_LEVEL: str = "DEBUG"


class StagingConfig(BaseConfig):
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"


class ProductionConfig(BaseConfig):
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"
    ENABLE_FILE_LOGGING: bool = True

    def __init__(self, **kwargs):
        super().__init__(**kwargs)

        if self.DEBUG:
            raise ValueError("DEBUG must be False in production!")

        if not self.ENABLE_FILE_LOGGING:
            raise ValueError("ENABLE_FILE_LOGGING must be enabled in production!")

        if self.MAX_WORKERS is not None and self.MAX_WORKERS < 1:
            raise ValueError("MAX_WORKERS must be at least 1!")


class TestingConfig(BaseConfig):
    ENVIRONMENT: Environment = Environment.TESTING
    DEBUG: bool = True
    LOG_LEVEL: str = "DEBUG"
    ENABLE_FILE_LOGGING: bool = False
    MAX_WORKERS: Optional[int] = 1


def get_config() -> BaseConfig:
    env = os.getenv("ENVIRONMENT", Environment.DEVELOPMENT.value).lower()
    config_map = {
        Environment.DEVELOPMENT.value: DevelopmentConfig,
        Environment.STAGING.value: StagingConfig,
        Environment.PRODUCTION.value: ProductionConfig,
        Environment.TESTING.value: TestingConfig,
    }
    return config_map.get(env, DevelopmentConfig)()


settings = get_config()
