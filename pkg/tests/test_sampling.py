from fractions import Fraction

import numpy as np

from src import expansion, fibre, sampling


def test_random_rational_in_range():
    rng = np.random.default_rng(1)
    for _ in range(500):
        x = sampling.random_rational(rng, Fraction(1, 3), Fraction(1, 2))
        assert Fraction(1, 3) <= x <= Fraction(1, 2)


def test_same_seed_same_draws():
    a = [sampling.random_digit(np.random.default_rng(5)) for _ in range(3)]
    b = [sampling.random_digit(np.random.default_rng(5)) for _ in range(3)]
    assert a == b


def test_random_digit_is_in_family():
    rng = np.random.default_rng(2)
    digits = [sampling.random_digit(rng) for _ in range(2000)]
    assert all(d == 0 or d.numerator == 1 for d in digits)
    assert 300 < sum(1 for d in digits if d == 0) < 700
    assert max(d.denominator for d in digits) > 100, "the digit tail should be heavy"


def test_terminating_x_expansion_terminates():
    """The greedy expansion of 2^N·x ends exactly after `length` digits"""
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = sampling.random_terminating_x(rng, 2, 5)
        assert 0 < x <= Fraction(1, 56 * 4)
        e = expansion.greedy_base8(x * 4, 5)
        assert e.remainder == 0, f"x = {x}"
        assert all(d != 0 for d in e.digits)


def test_dyadic_in_AN():
    rng = np.random.default_rng(4)
    for _ in range(20):
        y = sampling.random_dyadic_in_AN(rng, 16, 48)
        assert y.denominator & (y.denominator - 1) == 0
        assert fibre.check_AN(fibre.binary_expand(y), 16).verdict


def test_attractor_samples_follow_prefix():
    rng = np.random.default_rng(6)
    prefix = [1, 0, 1]
    window = (Fraction(5, 8), Fraction(5, 8) + Fraction(1, 64))
    points = list(sampling.attractor_samples(rng, prefix, 200, 12, window))
    assert len(points) == 200
    for p in points:
        assert Fraction(5, 8) <= p.y <= Fraction(3, 4)
        assert 0 <= p.x <= 1 - p.y
    forced = points[::2]
    assert all(window[0] - Fraction(1, 4096) <= p.y <= window[1] + Fraction(1, 4096) for p in forced)
