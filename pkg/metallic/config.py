from typing import Tuple

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_prefix="METALLIC_")

    samples: int = 100
    seed: int = 42
    tol: float = 1e-9
    report_format: str = "text"
    base_interval: Tuple[float, float] = (-1.0, 1.0)
    rank_threshold: float = 1e-8
    positive_definite_floor: float = 1e-10


settings = Settings()
