import logging
import os
from fractions import Fraction

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict

from src.errors import ConfigError, InvalidArgumentError
from src.rationals import Rational, parse_rational

# logging.getLevelNamesMapping is Python 3.11+; it returns a copy of _nameToLevel
_level_names = getattr(logging, "getLevelNamesMapping", lambda: dict(logging._nameToLevel))

load_dotenv()


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    word_limit: int = 200_000
    # render never materialises words, so its guard is much looser
    render_word_limit: int = 10_000_000_000
    node_budget: int = 2_000_000
    epsilon_floor: Rational = Fraction(1, 16384)
    gap_min_width: Rational = Fraction(1, 64)
    window_budget: int = 64
    render_precision: int = 128
    pixel_limit: int = 4_194_304
    log_level: str = "INFO"
    api_host: str = "0.0.0.0"
    api_port: int = 8000


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


def _rational_env(name: str, default: str) -> Fraction:
    raw = os.getenv(name, default)
    try:
        value = parse_rational(raw)
    except InvalidArgumentError as e:
        raise ConfigError(f"{name}: {e}") from None
    if not 0 < value <= 1:
        raise ConfigError(f"{name} must lie in (0, 1], got {raw!r}")
    return value


def load_settings() -> Settings:
    """
    Read settings from the environment (after .env has been merged).

    Read fresh on every call so a changed environment is picked up.

    Returns:
        Settings: frozen settings object
    """
    level = os.getenv("FRACTAL_LOG_LEVEL", "INFO").upper()
    if level not in _level_names():
        raise ConfigError(f"FRACTAL_LOG_LEVEL is not a logging level: {level!r}")

    return Settings(
        word_limit=_int_env("FRACTAL_WORD_LIMIT", 200_000),
        render_word_limit=_int_env("FRACTAL_RENDER_WORD_LIMIT", 10_000_000_000),
        node_budget=_int_env("FRACTAL_NODE_BUDGET", 2_000_000),
        epsilon_floor=_rational_env("FRACTAL_EPSILON_FLOOR", "1/16384"),
        gap_min_width=_rational_env("FRACTAL_GAP_MIN_WIDTH", "1/64"),
        window_budget=_int_env("FRACTAL_WINDOW_BUDGET", 64),
        render_precision=_int_env("FRACTAL_RENDER_PRECISION", 128),
        pixel_limit=_int_env("FRACTAL_PIXEL_LIMIT", 4_194_304),
        log_level=level,
        api_host=os.getenv("FRACTAL_API_HOST", "0.0.0.0"),
        api_port=_int_env("FRACTAL_API_PORT", 8000),
    )


def configure_logging(settings: Settings | None = None):
    """Configure the root logger once for an entry point"""
    settings = settings or load_settings()
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
