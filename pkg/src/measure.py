"""
Certified lower bound for the area of K.

For y in A_N the fibre K_y contains I_N = [0, 1/(56·2^N)], so by Fubini
area(K) >= L(A_N)/(56·2^N). The complement of A_N is covered by the events
"fewer than 2n/5 zeros among the first n digits", n >= N, whence

    L(A_N) >= 1 - Σ_{n=N}^{M} failProb(n) - Σ_{n>M} failProb(n).

The first sum is computed exactly from binomial counts. The tail is dominated by
a geometric series: with z = 2/3 the generating-function bound
P(zeros <= 2n/5) <= z^(-2n/5)·((1+z)/2)^n gives failProb(n) <= θ^n with
θ^5 = (3/2)^2·(5/6)^5 = 28125/31104, and θ^5 <= ρ^5 for ρ = (99/100)^2. So
failProb(n) <= c·ρ^n with c = 1 and the tail is at most ρ^(M+1)/(1-ρ).
"""

import logging
from fractions import Fraction
from math import comb
from typing import Iterator

from src.errors import FractalError, InvalidArgumentError
from src.models import BinomialFailProb, MeasureCertificate, VerificationFailure, VerificationReport
from src.rationals import format_rational

logger = logging.getLogger(__name__)

C = Fraction(1)
RHO = Fraction(99, 100) ** 2
THETA_FIFTH = Fraction(28125, 31104)
# I_N has length 1/(56·2^N)
INTERVAL_SCALE = 56
SPOT_CHECK_LENGTH = 500


def fail_threshold(n: int) -> int:
    """Largest zero count j that still fails, i.e. 5j < 2n"""
    return (2 * n - 1) // 5


def fail_count(n: int) -> int:
    """Number of binary strings of length n with fewer than 2n/5 zeros"""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    return sum(comb(n, j) for j in range(fail_threshold(n) + 1))


def binom_fail_prob(n: int) -> Fraction:
    """Exact 2^-n · Σ_{5j < 2n} C(n, j)"""
    return Fraction(fail_count(n), 1 << n)


def binom_success_prob(n: int) -> Fraction:
    """Exact probability of at least 2n/5 zeros, summed independently of binom_fail_prob"""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    return Fraction(sum(comb(n, j) for j in range(fail_threshold(n) + 1, n + 1)), 1 << n)


def fail_record(n: int) -> BinomialFailProb:
    return BinomialFailProb(n=n, threshold=fail_threshold(n), value=binom_fail_prob(n))


def iter_fail_counts() -> Iterator[tuple[int, int]]:
    """
    Yield (n, S(n)) for n = 1, 2, ... with S(n) = Σ_{j <= t(n)} C(n, j).

    Pascal's rule gives S(n+1, t) = 2·S(n, t) - C(n, t); when the threshold
    moves up by one the new term C(n+1, t+1) is added. C(n, t) is carried along
    with exact integer ratios.
    """
    n, t, total, edge = 1, 0, 1, 1  # edge = C(n, t)
    while True:
        yield n, total
        total = 2 * total - edge
        edge = edge * (n + 1) // (n + 1 - t)
        n += 1
        if fail_threshold(n) == t + 1:
            edge = edge * (n - t) // (t + 1)
            t += 1
            total += edge


def fail_counts(M: int) -> list[int]:
    """[S(1), ..., S(M)]"""
    if M < 1:
        raise InvalidArgumentError(f"M must be >= 1, got {M}")
    counts = []
    for n, total in iter_fail_counts():
        counts.append(total)
        if n == M:
            return counts


def domination_lemma_holds() -> bool:
    """θ^5 = 28125/31104 <= ρ^5, checked as an integer inequality"""
    return THETA_FIFTH <= RHO ** 5 and 0 < RHO < 1


def tail_bound(M: int) -> Fraction:
    """c·ρ^(M+1)/(1 - ρ) >= Σ_{n>M} failProb(n)"""
    return C * RHO ** (M + 1) / (1 - RHO)


def spot_check_domination(start: int, stop: int) -> int | None:
    """
    Check S(n)/2^n <= c·ρ^n exactly for start <= n <= stop.

    Returns the first violating n, or None when every n passes.
    """
    lhs_scale = RHO.denominator ** start
    rhs_scale = (2 * RHO.numerator) ** start
    for n, total in iter_fail_counts():
        if n < start:
            continue
        if n > stop:
            return None
        if total * lhs_scale > C * rhs_scale:
            return n
        lhs_scale *= RHO.denominator
        rhs_scale *= 2 * RHO.numerator


def _exact_part(counts: list[int], N: int, M: int) -> Fraction:
    # Σ_{n=N}^{M} S(n)·2^(M-n) over 2^M
    numerator = 0
    for n in range(N, M + 1):
        numerator = 2 * numerator + counts[n - 1]
    return Fraction(numerator, 1 << M)


def _check_range(N: int, M: int):
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}")
    if M < N:
        raise InvalidArgumentError(f"M must be >= N, got N={N}, M={M}")


def an_lower_bound(N: int, M: int) -> MeasureCertificate:
    """
    Certified lower bound for L(A_N) and the induced bound for area(K).

    Args:
        N: window length of A_N
        M: cutoff between the exact sum and the geometric tail

    Returns:
        MeasureCertificate: an_lower may be 0 for small N (no claim)
    """
    _check_range(N, M)
    if not domination_lemma_holds():
        raise FractalError("tail domination constants fail their exact check")

    counts = fail_counts(M)
    exact_part = _exact_part(counts, N, M)
    leading = fail_record(N)
    tail = tail_bound(M)
    an_lower = max(Fraction(0), 1 - exact_part - tail)
    area_lower = an_lower / (INTERVAL_SCALE * (1 << N))

    spot = (M + 1, M + SPOT_CHECK_LENGTH)
    violation = spot_check_domination(*spot)
    if violation is not None:
        raise FractalError(f"failProb({violation}) exceeds c·rho^{violation}")

    transcript = [
        f"A_N misses y only if some n >= {N} has fewer than 2n/5 zeros among y_1..y_n",
        f"failProb({N}) = {format_rational(leading.value)}: at most {leading.threshold} zeros among {N} digits",
        f"Σ_{{n={N}}}^{{{M}}} failProb(n) = {format_rational(exact_part)} (exact binomial counts)",
        f"failProb(n) <= θ^n with θ^5 = {format_rational(THETA_FIFTH)} <= ρ^5, ρ = {format_rational(RHO)}, c = {format_rational(C)}",
        f"failProb(n) <= c·ρ^n re-checked exactly for {spot[0]} <= n <= {spot[1]}",
        f"Σ_{{n>{M}}} failProb(n) <= c·ρ^{M + 1}/(1-ρ) = {format_rational(tail)}",
        f"L(A_{N}) >= max(0, 1 - exact - tail) = {format_rational(an_lower)}",
        f"every y in A_{N} has [0, 1/(56·2^{N})] inside its fibre, so area(K) >= {format_rational(area_lower)}",
    ]
    logger.info("measure N=%d M=%d: anLower %s 0", N, M, ">" if an_lower > 0 else "=")
    return MeasureCertificate(
        N=N,
        M=M,
        c=C,
        rho=RHO,
        exact_part=exact_part,
        tail_bound=tail,
        an_lower=an_lower,
        area_lower=area_lower,
        leading_term=leading,
        spot_check=spot,
        transcript=transcript,
    )


def area_lower_bound(N: int, M: int) -> Fraction:
    """anLower/(56·2^N); 0 means no claim"""
    return an_lower_bound(N, M).area_lower


def minimal_positive_N(M: int, N_max: int | None = None) -> int | None:
    """
    Smallest N <= min(M, N_max) with anLower(N, M) > 0, or None.

    One backward pass builds every suffix of the exact sum, so each N costs a
    single comparison.
    """
    if M < 1:
        raise InvalidArgumentError(f"M must be >= 1, got {M}")
    N_max = M if N_max is None else min(N_max, M)
    counts = fail_counts(M)
    tail = tail_bound(M)
    # suffix[N] = Σ_{n=N}^{M} S(n)·2^(M-n)
    suffixes = {}
    numerator = 0
    for n in range(M, 0, -1):
        numerator += counts[n - 1] << (M - n)
        suffixes[n] = numerator
    for N in range(1, N_max + 1):
        if 1 - Fraction(suffixes[N], 1 << M) - tail > 0:
            return N
    return None


def verify_measure_certificate(c: MeasureCertificate) -> VerificationReport:
    """Recompute every number of the certificate exactly"""
    failures: list[VerificationFailure] = []
    try:
        expected = an_lower_bound(c.N, c.M)
    except (InvalidArgumentError, FractalError) as e:
        return VerificationReport(ok=False, checks=1, failures=[VerificationFailure(check="input", detail=str(e))])

    for field in ("c", "rho", "exact_part", "tail_bound", "an_lower", "area_lower"):
        if getattr(c, field) != getattr(expected, field):
            failures.append(VerificationFailure(
                check=field, detail=f"{field} = {format_rational(getattr(c, field))} but recomputed "
                                    f"{format_rational(getattr(expected, field))}",
            ))
    if c.leading_term != expected.leading_term:
        failures.append(VerificationFailure(
            check="leading_term", detail=f"failProb({c.N}) recorded as {format_rational(c.leading_term.value)}",
        ))
    if not 0 <= c.an_lower <= 1:
        failures.append(VerificationFailure(check="range", detail="anLower outside [0, 1]"))
    return VerificationReport(ok=not failures, checks=8, failures=failures)
