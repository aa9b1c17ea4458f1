from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    app_env: str = Field(default="development", alias="APP_ENV")
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")
    log_format: str = Field(default="json", alias="LOG_FORMAT")

    # 1 keeps sweeps in-process; larger values fan cells out to a process pool.
    planner_workers: int = Field(default=1, ge=1, alias="PLANNER_WORKERS")
    planner_output_dir: str = Field(default="results", alias="PLANNER_OUTPUT_DIR")
    planner_debug: bool = Field(default=False, alias="PLANNER_DEBUG")
    planner_sweep_seeds: int = Field(default=5, ge=1, alias="PLANNER_SWEEP_SEEDS")


@lru_cache
def get_settings() -> Settings:
    return Settings()
