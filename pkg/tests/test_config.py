from fractions import Fraction

import pytest

from src.config import load_settings
from src.errors import ConfigError


def test_defaults(monkeypatch):
    """Settings fall back to the documented defaults"""
    for name in ("FRACTAL_WORD_LIMIT", "FRACTAL_RENDER_WORD_LIMIT", "FRACTAL_EPSILON_FLOOR", "FRACTAL_GAP_MIN_WIDTH", "FRACTAL_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)

    settings = load_settings()

    assert settings.word_limit == 200_000
    assert settings.render_word_limit == 10_000_000_000
    assert settings.epsilon_floor == Fraction(1, 16384)
    assert settings.gap_min_width == Fraction(1, 64)
    assert settings.log_level == "INFO"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("FRACTAL_WORD_LIMIT", "10")
    monkeypatch.setenv("FRACTAL_EPSILON_FLOOR", "1/1024")
    monkeypatch.setenv("FRACTAL_LOG_LEVEL", "debug")

    settings = load_settings()

    assert settings.word_limit == 10
    assert settings.epsilon_floor == Fraction(1, 1024)
    assert settings.log_level == "DEBUG"


@pytest.mark.parametrize("name,value", [
    ("FRACTAL_WORD_LIMIT", "many"),
    ("FRACTAL_NODE_BUDGET", "0"),
    ("FRACTAL_EPSILON_FLOOR", "2"),
    ("FRACTAL_GAP_MIN_WIDTH", "0.1.2"),
    ("FRACTAL_LOG_LEVEL", "LOUD"),
])
def test_malformed_values_raise(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError, match=name):
        load_settings()
