"""Configuration settings for the pipeline."""
import os
from pathlib import Path
from typing import Optional, Union

import orjson
from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator

from morph4d.errors import ConfigError, ConfigReadError
from morph4d.evaluation.losses import S2DWeights
from morph4d.trajectory.sphere import KARCHER_MAX_ITER, KARCHER_TOL, NUMERIC_EPSILON
from morph4d.utils import get_logger

# Load environment variables from .env file
load_dotenv(find_dotenv(usecwd=True))

logger = get_logger(__name__)

CONFIG_ENV_VAR = "MORPH4D_CONFIG"


class PipelineConfig(BaseModel):
    """Pipeline settings; a single JSON document on disk."""
    model_config = ConfigDict(extra='forbid', frozen=True)

    label_set_path: Optional[Path] = None
    landmark_index_path: Optional[Path] = None
    n_steps: int = Field(default=30, ge=2)
    pca_modes: Optional[int] = Field(default=None, ge=1)
    variance_target: float = Field(default=0.99, gt=0.0, le=1.0)
    ridge: Optional[float] = Field(default=None, ge=0.0)
    expression_specific_mean: bool = False
    top_k: int = Field(default=10, ge=1)
    sliding_window: int = Field(default=20, ge=1)
    numeric_epsilon: float = Field(default=NUMERIC_EPSILON, gt=0.0)
    karcher_tol: float = Field(default=KARCHER_TOL, gt=0.0)
    karcher_max_iter: int = Field(default=KARCHER_MAX_ITER, ge=1)
    s2d_weights: S2DWeights = Field(default_factory=S2DWeights)
    log_level: str = "INFO"

    @field_validator('label_set_path', 'landmark_index_path')
    @classmethod
    def path_must_exist(cls, v: Optional[Path]) -> Optional[Path]:
        if v is not None and not v.exists():
            raise ValueError(f'path does not exist: {v}')
        return v

    @field_validator('log_level')
    @classmethod
    def known_log_level(cls, v: str) -> str:
        v = v.upper()
        if v not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ValueError(f'unknown log level {v}')
        return v


def load_config(path: Optional[Union[str, Path]] = None) -> PipelineConfig:
    """
    Load the pipeline configuration.

    Precedence: explicit ``path``, then the file named by MORPH4D_CONFIG,
    then defaults. Relative paths inside the file resolve against the
    file's directory.

    Raises:
        ConfigReadError: the file cannot be read
        ConfigError: malformed JSON or invalid settings
    """
    if path is None:
        path = os.getenv(CONFIG_ENV_VAR) or None
    if path is None:
        return PipelineConfig()

    path = Path(path)
    try:
        raw = orjson.loads(path.read_bytes())
    except OSError as e:
        raise ConfigReadError(f"cannot read config {path}: {e}") from e
    except orjson.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")

    for key in ('label_set_path', 'landmark_index_path'):
        if isinstance(raw.get(key), str) and not Path(raw[key]).is_absolute():
            raw[key] = str(path.parent / raw[key])

    try:
        config = PipelineConfig.model_validate(raw)
    except PydanticValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e
    logger.debug("Loaded config", path=str(path))
    return config
