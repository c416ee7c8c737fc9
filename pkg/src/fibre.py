"""
Fibre certificates: explicit digits showing that x lies in the fibre K_y.

For y in A_N (at least 2n/5 zeros among the first n binary digits, for every
n >= N) and x in I_N = [0, 1/(56·2^N)], the sparse expansion d* of x has its
nonzero digits on positions N + 3j. Window W_k collects the nonzero positions in
kN+1 .. (k+1)N; S_k takes the first #W_k zero positions of y at or below kN
that earlier windows left unused; pairing S_k with W_k in increasing order gives
f with f(i) > i, and

    d**_i = d*_{f(i)} / 2^(f(i)-i) = 1/(2^(f(i)-i) · n)

is again a digit of the family, with Σ_{i in Z} d**_i / 2^i = x.

Only dyadic y are accepted: their expansions terminate, so A_N membership is
a finite check. A_N is read literally as 5·zeros >= 2n.
"""

import logging
from fractions import Fraction
from math import ceil

from src import ifs
from src.config import load_settings
from src.errors import InvalidArgumentError, MatchingInfeasibleError
from src.expansion import sparse_expansion
from src.models import (
    ANMembership,
    Assignment,
    BinaryExpansion,
    FibreCertificate,
    Point,
    VerificationFailure,
    VerificationReport,
    WindowRecord,
)
from src.rationals import dyadic_exponent, format_rational, is_dyadic, is_unit_fraction

logger = logging.getLogger(__name__)


def binary_expand(y: Fraction, length: int | None = None) -> BinaryExpansion:
    """
    Terminating binary expansion of a dyadic y in [0, 1).

    Digits are stored through max(length, last nonzero position); every later
    digit is 0. y = 1 is refused: its only expansion is all ones.
    """
    y = Fraction(y)
    if not is_dyadic(y):
        raise InvalidArgumentError(f"y = {format_rational(y)} is not dyadic")
    if not 0 <= y < 1:
        raise InvalidArgumentError(f"y = {format_rational(y)} must lie in [0, 1) for a terminating expansion")
    e = dyadic_exponent(y)
    stored = max(length or 0, e)
    digits = [(y.numerator >> (e - i)) & 1 if i <= e else 0 for i in range(1, stored + 1)]
    return BinaryExpansion(y=y, digits=digits)


def satisfies_density(zeros: int, n: int) -> bool:
    """zeros >= 0.4·n, as the exact integer inequality 5·zeros >= 2n"""
    return 5 * zeros >= 2 * n


def check_AN(y: BinaryExpansion, N: int) -> ANMembership:
    """
    Decide y in A_N exactly.

    Past the last digit 1 (position i0, with z0 zeros up to it) the zero count is
    z0 + n - i0, which satisfies the density inequality for every
    n >= ceil(5(i0 - z0)/3). Checking n = N .. max(N, i0, that bound) decides all n.
    """
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}")
    i0 = y.last_one
    ones = sum(y.digits[:i0])
    n_star = ceil(Fraction(5 * ones, 3))
    horizon = max(N, i0, n_star)

    trace = []
    first_failure = None
    zeros = len(y.zeros_through(N - 1))
    for n in range(N, horizon + 1):
        if y.digit(n) == 0:
            zeros += 1
        trace.append(zeros)
        if first_failure is None and not satisfies_density(zeros, n):
            first_failure = n

    return ANMembership(
        y=y.y,
        N=N,
        horizon=horizon,
        verdict=first_failure is None,
        trace=trace,
        first_failure=first_failure,
    )


def certify_fibre_point(x: Fraction, y: Fraction, N: int, window_budget: int | None = None) -> FibreCertificate:
    """
    Build and verify the digit certificate that x lies in K_y.

    Args:
        x: rational in I_N = [0, 1/(56·2^N)]
        y: dyadic rational in A_N
        N: window length
        window_budget: number of windows covered (settings default when None)

    Returns:
        FibreCertificate: exact when the greedy expansion terminates inside the
        budget, otherwise truncated at position P with |Σ - x| <= 2^-P
    """
    x = Fraction(x)
    expansion_y = binary_expand(y)
    membership = check_AN(expansion_y, N)
    if not membership.verdict:
        raise InvalidArgumentError(
            f"y = {format_rational(y)} is not in A_{N} (density fails at n = {membership.first_failure})"
        )
    budget = window_budget if window_budget is not None else load_settings().window_budget
    if budget < 1:
        raise InvalidArgumentError(f"window budget must be >= 1, got {budget}")

    M = budget * N // 3
    greedy, sparse = sparse_expansion(x, N, M)
    truncation = None if greedy.terminated else N + 3 * M

    by_window: dict[int, list] = {}
    for entry in sparse.entries:
        by_window.setdefault((entry.position - 1) // N, []).append(entry)
    last_window = max(by_window, default=0)

    threshold = ceil(Fraction(N, 3))
    unused = []
    next_position = 1
    windows = []
    assignment = []
    for k in range(1, last_window + 1):
        while next_position <= k * N:
            if expansion_y.digit(next_position) == 0:
                unused.append(next_position)
            next_position += 1
        targets = by_window.get(k, [])
        available = len(unused)
        if available < len(targets):
            raise MatchingInfeasibleError(k=k, available=available, needed=len(targets))
        selection, unused = unused[:len(targets)], unused[len(targets):]
        windows.append(WindowRecord(
            k=k,
            positions=[t.position for t in targets],
            selection=selection,
            available=available,
            density_bound_holds=available > threshold,
        ))
        for src, target in zip(selection, targets):
            digit = target.value / (1 << (target.position - src))
            assignment.append(Assignment(src=src, dst=target.position, digit=digit))

    certificate = FibreCertificate(
        y=expansion_y.y,
        N=N,
        x=x,
        sparse=sparse,
        windows=windows,
        assignment=assignment,
        truncation=truncation,
    )
    report = verify_fibre_certificate(certificate)
    if not report.ok:
        logger.error("fibre certificate for x=%s failed its own verification: %s", format_rational(x), report.failures[0].detail)
    logger.debug("fibre certificate x=%s y=%s N=%d: %d pairs over %d windows",
                 format_rational(x), format_rational(y), N, len(assignment), len(windows))
    return certificate.model_copy(update={"verified": report.ok})


def verify_fibre_certificate(c: FibreCertificate) -> VerificationReport:
    """
    Exactly re-check a fibre certificate.

    Sources are distinct zero positions of y, targets hit every nonzero position
    of d* exactly once, f(i) > i, d**_i = d*_f(i) / 2^(f(i)-i), each d** is a digit
    of the family, and Σ d**_i / 2^i equals x (or is within 2^-P of x when the
    certificate is truncated at P).
    """
    failures: list[VerificationFailure] = []
    checks = 0

    def fail(check: str, detail: str, index: int | None = None):
        failures.append(VerificationFailure(check=check, index=index, detail=detail))

    checks += 1
    try:
        expansion_y = binary_expand(c.y)
    except InvalidArgumentError as e:
        fail("input", str(e))
        return VerificationReport(ok=False, checks=checks, failures=failures)

    checks += 1
    previous = c.N
    for entry in c.sparse.entries:
        if entry.position <= previous or (entry.position - c.N) % 3 != 0:
            fail("sparse-shape", f"position {entry.position} breaks the N + 3j progression", entry.position)
        if not is_unit_fraction(entry.value):
            fail("sparse-shape", f"d*_{entry.position} = {format_rational(entry.value)} is not 1/n", entry.position)
        previous = max(previous, entry.position)
    sparse_values = {entry.position: entry.value for entry in c.sparse.entries}

    checks += 1
    sources = [pair.src for pair in c.assignment]
    if len(set(sources)) != len(sources):
        fail("bijection", "a source position is used twice")
    targets = [pair.dst for pair in c.assignment]
    if sorted(targets) != sorted(sparse_values):
        fail("bijection", "targets do not match the nonzero positions of d* one-to-one")

    total = Fraction(0)
    for pair in c.assignment:
        checks += 4
        if expansion_y.digit(pair.src) != 0:
            fail("source-zero", f"a_{pair.src} = 1, not a zero position of y", pair.src)
        if pair.dst <= pair.src:
            fail("order", f"f({pair.src}) = {pair.dst} is not > {pair.src}", pair.src)
        if pair.dst in sparse_values and pair.dst > pair.src:
            expected = sparse_values[pair.dst] / (1 << (pair.dst - pair.src))
            if pair.digit != expected:
                fail("digit-formula",
                     f"d**_{pair.src} = {format_rational(pair.digit)} but d*_{pair.dst}/2^{pair.dst - pair.src} = {format_rational(expected)}",
                     pair.src)
        if pair.digit != 0 and not is_unit_fraction(pair.digit):
            fail("digit-set", f"d**_{pair.src} = {format_rational(pair.digit)} is not some t_(k,n)", pair.src)
        total += pair.digit / (1 << pair.src)

    checks += 1
    if c.truncation is None:
        if total != c.x:
            fail("sum", f"Σ d**_i/2^i = {format_rational(total)} differs from x = {format_rational(c.x)}")
    elif abs(total - c.x) > Fraction(1, 1 << c.truncation):
        fail("sum", f"|Σ d**_i/2^i - x| exceeds 2^-{c.truncation}")

    return VerificationReport(ok=not failures, checks=checks, failures=failures)


def fibre_point(c: FibreCertificate) -> Point:
    """The point of K that the certificate's digits select, via sample_point"""
    expansion_y = binary_expand(c.y)
    digits = {pair.src: pair.digit for pair in c.assignment}
    depth = max([expansion_y.length] + list(digits))
    return ifs.sample_point(expansion_y.digits, digits, depth)


def descriptor_for_pair(pair: Assignment) -> tuple[int, int]:
    """(k, n) with d**_i = t_(k,n): k = f(i) - i and n the denominator of d*_f(i)"""
    k = pair.dst - pair.src
    return k, pair.digit.denominator >> k
