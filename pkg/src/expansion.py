"""
Greedy base-8 expansions with digits in {0} ∪ {1/n}.

For x in [0, 1/56] each step takes the largest digit not exceeding 8·x_{i-1}
and keeps x_i = 8·x_{i-1} - d_i in [0, 1/56], so

    x = Σ_{i<=M} d_i / 8^i + x_M / 8^M.

An exact hit (8·x_{i-1} equal to a digit) leaves remainder 0 and the expansion
terminates with an all-zero tail. Read in base 2, digit i sits at position 3i;
scaling by 2^N first moves it to N + 3i, which is the sparse sequence the fibre
certificates consume.

With `max_denominator = B` (B >= 56) the digit set is {0} ∪ {1/n : n <= B}.
B = 248 reproduces the bounded digit set; the plain greedy is unbounded and
yields e.g. 1/7000 for x = 1/56000.
"""

import logging
from fractions import Fraction

from src.errors import InvalidArgumentError
from src.models import GreedyExpansion, SparseBase2, SparseEntry, VerificationFailure, VerificationReport
from src.rationals import format_rational, is_unit_fraction

logger = logging.getLogger(__name__)

BOUND = Fraction(1, 56)
# smallest B for which the bounded digit set still keeps remainders <= 1/56
MIN_MAX_DENOMINATOR = 56
REMARK_MAX_DENOMINATOR = 248


def greedy_digit(v: Fraction, max_denominator: int | None = None) -> Fraction:
    """Largest element of {0} ∪ {1/n : n <= max_denominator} that is <= v"""
    if v <= 0:
        return Fraction(0)
    if v >= 1:
        return Fraction(1)
    # smallest n with 1/n <= v is ceil(1/v)
    n = -(-v.denominator // v.numerator)
    if max_denominator is not None and n > max_denominator:
        return Fraction(0)
    return Fraction(1, n)


def _check_max_denominator(max_denominator: int | None):
    if max_denominator is not None and max_denominator < MIN_MAX_DENOMINATOR:
        raise InvalidArgumentError(
            f"max_denominator must be >= {MIN_MAX_DENOMINATOR} to keep remainders in [0, 1/56]"
        )


def greedy_base8(x: Fraction, M: int, max_denominator: int | None = None) -> GreedyExpansion:
    """
    First M greedy base-8 digits of x and the remainders x_1 .. x_M.

    Args:
        x: rational in [0, 1/56]
        M: number of digits
        max_denominator: optional bound B on the digit denominators

    Returns:
        GreedyExpansion
    """
    x = Fraction(x)
    if not 0 <= x <= BOUND:
        raise InvalidArgumentError(f"x = {format_rational(x)} is outside [0, 1/56]")
    if M < 0:
        raise InvalidArgumentError(f"M must be >= 0, got {M}")
    _check_max_denominator(max_denominator)

    digits: list[Fraction] = []
    remainders: list[Fraction] = []
    remainder = x
    for i in range(1, M + 1):
        if remainder == 0:
            digits.extend([Fraction(0)] * (M - i + 1))
            remainders.extend([Fraction(0)] * (M - i + 1))
            logger.debug("greedy expansion of %s terminated after %d digits", format_rational(x), i - 1)
            break
        v = 8 * remainder
        digit = greedy_digit(v, max_denominator)
        remainder = v - digit
        assert 0 <= remainder <= BOUND, f"remainder {remainder} left [0, 1/56] at step {i}"
        digits.append(digit)
        remainders.append(remainder)

    return GreedyExpansion(x=x, digits=digits, remainders=remainders, max_denominator=max_denominator)


def partial_sum(digits: list[Fraction]) -> Fraction:
    """Σ d_i / 8^i"""
    total = Fraction(0)
    for i, digit in enumerate(digits, start=1):
        if digit:
            total += digit / (8 ** i)
    return total


def truncation_error_bound(M: int) -> Fraction:
    """|x - Σ_{i<=M} d_i/8^i| <= (1/56)·8^-M"""
    return BOUND / (8 ** M)


def verify_expansion(e: GreedyExpansion) -> VerificationReport:
    """
    Re-check a GreedyExpansion exactly.

    Per index: remainder in [0, 1/56], digit in the digit set, digit is the
    greedy choice for 8·x_{i-1}, and x_i = 8·x_{i-1} - d_i. Finally the identity
    x = Σ d_i/8^i + x_M/8^M. Failures are listed in index order.
    """
    failures: list[VerificationFailure] = []
    checks = 0

    if len(e.digits) != len(e.remainders):
        failures.append(VerificationFailure(
            check="shape",
            detail=f"{len(e.digits)} digits but {len(e.remainders)} remainders",
        ))
        return VerificationReport(ok=False, checks=1, failures=failures)

    previous = e.x
    checks += 1
    if not 0 <= previous <= BOUND:
        failures.append(VerificationFailure(check="remainder-range", index=0, detail="x outside [0, 1/56]"))

    for i, (digit, remainder) in enumerate(zip(e.digits, e.remainders), start=1):
        v = 8 * previous
        checks += 4
        if digit != 0 and not is_unit_fraction(digit):
            failures.append(VerificationFailure(
                check="digit-set", index=i, detail=f"d_{i} = {format_rational(digit)} is not 0 or 1/n",
            ))
        expected = greedy_digit(v, e.max_denominator)
        if digit != expected:
            relation = "exceeds" if digit > v else "is not the largest digit below"
            failures.append(VerificationFailure(
                check="greedy-choice", index=i,
                detail=f"d_{i} = {format_rational(digit)} {relation} 8·x_{i-1} = {format_rational(v)}",
            ))
        if remainder != v - digit:
            failures.append(VerificationFailure(
                check="remainder-step", index=i,
                detail=f"x_{i} = {format_rational(remainder)} but 8·x_{i-1} - d_{i} = {format_rational(v - digit)}",
            ))
        if not 0 <= remainder <= BOUND:
            failures.append(VerificationFailure(
                check="remainder-range", index=i, detail=f"x_{i} = {format_rational(remainder)} outside [0, 1/56]",
            ))
        previous = remainder

    checks += 1
    M = len(e.digits)
    if partial_sum(e.digits) + e.remainder / (8 ** M) != e.x:
        failures.append(VerificationFailure(
            check="identity", detail="x != Σ d_i/8^i + x_M/8^M",
        ))

    failures.sort(key=lambda f: (f.index is None, f.index or 0))
    return VerificationReport(ok=not failures, checks=checks, failures=failures)


def embed_base2(e: GreedyExpansion, N: int) -> SparseBase2:
    """
    Reinterpret the expansion of 2^N·x as a sparse base-2 sequence for x.

    Digit j lands at position N + 3j: Σ_j d_j/8^j / 2^N = Σ_j d_j / 2^(N+3j).
    Positions are > N, congruent to N mod 3, and strictly increasing.
    """
    if N < 0:
        raise InvalidArgumentError(f"N must be >= 0, got {N}")
    if not 0 <= e.x <= BOUND:
        raise InvalidArgumentError(f"expanded value {format_rational(e.x)} is outside [0, 1/56]")
    entries = [
        SparseEntry(position=N + 3 * j, value=digit)
        for j, digit in enumerate(e.digits, start=1)
        if digit != 0
    ]
    return SparseBase2(offset=N, entries=entries)


def sparse_expansion(x: Fraction, N: int, M: int, max_denominator: int | None = None) -> tuple[GreedyExpansion, SparseBase2]:
    """
    Greedy expansion of 2^N·x and its sparse base-2 embedding.

    Raises InvalidArgumentError when x is outside [0, 1/(56·2^N)].
    """
    x = Fraction(x)
    if N < 0:
        raise InvalidArgumentError(f"N must be >= 0, got {N}")
    limit = BOUND / (1 << N)
    if not 0 <= x <= limit:
        raise InvalidArgumentError(f"x = {format_rational(x)} is outside [0, {format_rational(limit)}]")
    expansion = greedy_base8(x * (1 << N), M, max_denominator)
    return expansion, embed_base2(expansion, N)
