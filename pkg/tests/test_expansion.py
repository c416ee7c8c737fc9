from fractions import Fraction

import numpy as np
import pytest

from src import expansion, sampling
from src.errors import InvalidArgumentError
from src.expansion import embed_base2, greedy_base8, sparse_expansion, verify_expansion


def test_zero_expands_to_zeros():
    e = greedy_base8(Fraction(0), 5)
    assert e.digits == [0] * 5
    assert e.remainder == 0 and e.terminated


def test_one_over_56_terminates():
    e = greedy_base8(Fraction(1, 56), 6)
    assert e.digits[0] == Fraction(1, 7)
    assert all(d == 0 for d in e.digits[1:])
    assert expansion.partial_sum(e.digits) == Fraction(1, 56)


def test_one_over_100():
    """Worked example: 1/13, 1/41 and remainder 3/13325 after two steps"""
    e = greedy_base8(Fraction(1, 100), 2)
    assert e.digits == [Fraction(1, 13), Fraction(1, 41)]
    assert e.remainder == Fraction(3, 13325)
    assert e.model_dump()["remainder"] == "3/13325"


def test_rejects_out_of_range():
    with pytest.raises(InvalidArgumentError):
        greedy_base8(Fraction(1, 55), 3)
    with pytest.raises(InvalidArgumentError):
        greedy_base8(Fraction(-1, 100), 3)
    with pytest.raises(InvalidArgumentError):
        greedy_base8(Fraction(1, 100), 3, max_denominator=40)


def test_random_expansions_are_sound():
    """Remainders stay in [0, 1/56] and the 20-digit truncation error is at most (1/56)·8^-20"""
    rng = np.random.default_rng(1)
    for _ in range(1000):
        x = sampling.random_rational(rng, Fraction(0), expansion.BOUND, max_denominator=5000)
        e = greedy_base8(x, 20)
        assert all(0 <= r <= expansion.BOUND for r in e.remainders), f"remainder out of range for x = {x}"
        assert abs(x - expansion.partial_sum(e.digits)) <= expansion.truncation_error_bound(20)
        assert all(d == 0 or d.denominator >= 7 for d in e.digits)


def test_bounded_digit_set():
    """With denominators capped at 248 every digit is 0 or 1/n with 7 <= n <= 248"""
    rng = np.random.default_rng(2)
    for _ in range(1000):
        x = sampling.random_rational(rng, Fraction(0), expansion.BOUND, max_denominator=5000)
        e = greedy_base8(x, 20, max_denominator=expansion.REMARK_MAX_DENOMINATOR)
        assert all(d == 0 or 7 <= d.denominator <= 248 for d in e.digits), f"digit bound broken for x = {x}"
        assert verify_expansion(e).ok


def test_plain_greedy_exceeds_248():
    """Small x forces large denominators in the unbounded greedy"""
    e = greedy_base8(Fraction(1, 56000), 1)
    assert e.digits == [Fraction(1, 7000)]


def test_verify_accepts_valid_and_flags_tampering():
    e = greedy_base8(Fraction(1, 56), 3)
    assert verify_expansion(e).ok

    bad_digit = e.model_copy(update={"digits": [Fraction(1, 6)] + e.digits[1:]})
    report = verify_expansion(bad_digit)
    assert not report.ok
    assert report.first_failure.index == 1
    assert report.first_failure.check == "digit-set" or report.first_failure.check == "greedy-choice"

    bad_remainder = e.model_copy(update={"remainders": [Fraction(1, 50)] + e.remainders[1:]})
    report = verify_expansion(bad_remainder)
    assert any(f.check == "remainder-range" for f in report.failures)


def test_embed_base2():
    assert embed_base2(greedy_base8(Fraction(0), 4), 3).entries == []

    _, sparse = sparse_expansion(Fraction(1, 448), 2, 5)
    assert [(s.position, s.value) for s in sparse.entries] == [(5, Fraction(1, 14))]
    assert sparse.value() == Fraction(1, 448)

    _, sparse = sparse_expansion(Fraction(1, 800), 3, 2)
    assert [(s.position, s.value) for s in sparse.entries] == [(6, Fraction(1, 13)), (9, Fraction(1, 41))]

    with pytest.raises(InvalidArgumentError):
        sparse_expansion(Fraction(1, 200), 2, 5)


def test_terminating_expansions_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = sampling.random_terminating_x(rng, 4, 5)
        e, sparse = sparse_expansion(x, 4, 10)
        assert e.terminated, f"expansion of {x} should terminate"
        assert sparse.value() == x
        positions = [s.position for s in sparse.entries]
        assert positions == sorted(positions) and all((p - 4) % 3 == 0 and p > 4 for p in positions)
