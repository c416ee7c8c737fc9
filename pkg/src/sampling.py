"""
Seeded pseudorandom inputs for property checks and point clouds.

All generators take a numpy Generator (np.random.default_rng(seed)) so every
run with the same seed produces the same rationals, digits and points.

Usage:
    rng = np.random.default_rng(7)
    x = random_terminating_x(rng, N=2, length=6)
    y = random_dyadic_in_AN(rng, N=16, length=64)
"""

from fractions import Fraction
from math import ceil, floor
from typing import Iterator, Sequence

import numpy as np

from src import ifs
from src.errors import InvalidArgumentError
from src.models import Point

# digit 0 is drawn with this probability; otherwise q = floor(1/u), heavy tailed
ZERO_DIGIT_PROBABILITY = 0.25


def random_rational(rng: np.random.Generator, lo: Fraction, hi: Fraction, max_denominator: int = 1000) -> Fraction:
    """lo + (hi - lo)·p/q with q <= max_denominator and 0 <= p <= q"""
    q = int(rng.integers(1, max_denominator + 1))
    p = int(rng.integers(0, q + 1))
    return Fraction(lo) + (Fraction(hi) - Fraction(lo)) * Fraction(p, q)


def random_terminating_x(rng: np.random.Generator, N: int, length: int, max_n: int = 400) -> Fraction:
    """
    Random x in I_N whose greedy base-8 expansion of 2^N·x terminates.

    Built backwards from remainder 0: digit 1/n is the greedy choice for
    v = 1/n + r exactly when 0 <= r < 1/(n(n-1)), so each earlier digit picks an
    n >= 8 with n(n-1)·r < 1 (n = 8 always qualifies because r < 1/56).
    """
    remainder = Fraction(0)
    for _ in range(length):
        upper = max_n
        while upper > 8 and upper * (upper - 1) * remainder >= 1:
            upper -= 1
        n = int(rng.integers(8, upper + 1))
        remainder = (Fraction(1, n) + remainder) / 8
    return remainder / (1 << N)


def random_bits(rng: np.random.Generator, length: int) -> list[int]:
    return [int(b) for b in rng.integers(0, 2, size=length)]


def random_dyadic_in_AN(rng: np.random.Generator, N: int, length: int, max_tries: int = 10_000) -> Fraction:
    """Rejection-sample a dyadic y with `length` fair random bits that lies in A_N"""
    from src.fibre import binary_expand, check_AN

    for _ in range(max_tries):
        bits = random_bits(rng, length)
        if bits and bits[-1] == 0:
            bits[-1] = 1
        y = sum((Fraction(b, 1 << i) for i, b in enumerate(bits, start=1)), Fraction(0))
        if check_AN(binary_expand(y), N).verdict:
            return y
    raise InvalidArgumentError(f"no y in A_{N} found in {max_tries} draws of length {length}")


def random_digit(rng: np.random.Generator) -> Fraction:
    """A digit from the full family: 0, or 1/q with P(q >= Q) about 1/Q"""
    if rng.random() < ZERO_DIGIT_PROBABILITY:
        return Fraction(0)
    u = 1.0 - rng.random()
    return Fraction(1, int(1 / u))


def attractor_samples(
    rng: np.random.Generator,
    prefix: Sequence[int],
    count: int,
    depth: int,
    y_window: tuple[Fraction, Fraction] | None = None,
) -> Iterator[Point]:
    """
    Points of K whose y expansion starts with `prefix`.

    Digits are drawn from the full (untruncated) family. With `y_window`, every
    other sample gets its tail bits chosen so y falls inside the window, which
    keeps falsification tests focused on a thin horizontal band.
    """
    m = len(prefix)
    if depth < m:
        raise InvalidArgumentError(f"depth {depth} is shorter than the prefix ({m})")
    tail = depth - m
    for index in range(count):
        if y_window is not None and index % 2 == 0:
            bits = _tail_inside(rng, prefix, depth, y_window)
        else:
            bits = list(prefix) + random_bits(rng, tail)
        digits = {i: random_digit(rng) for i in range(1, depth + 1) if bits[i - 1] == 0}
        yield ifs.sample_point(bits, digits, depth)


def _tail_inside(rng: np.random.Generator, prefix: Sequence[int], depth: int, window: tuple[Fraction, Fraction]) -> list[int]:
    m = len(prefix)
    base = sum(b << (depth - i) for i, b in enumerate(prefix, start=1))
    span = 1 << (depth - m)
    lo = max(base, floor(window[0] * (1 << depth)))
    hi = min(base + span - 1, ceil(window[1] * (1 << depth)))
    if lo > hi:
        return list(prefix) + random_bits(rng, depth - m)
    value = int(rng.integers(lo, hi + 1))
    return [(value >> (depth - i)) & 1 for i in range(1, depth + 1)]
