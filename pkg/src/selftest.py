"""
Desk-scale property suite behind `fractal-interior selftest`.

Each check is a plain function returning (ok, detail). They run in the order
of CHECKS and the first failure is reported by name.
"""

import logging
import time
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np

from src import expansion, fibre, ifs, interior, measure, sampling
from src.errors import FractalError
from src.models import Interval, SelfTestResult

logger = logging.getLogger(__name__)

SEED = 20240601


def check_digit_set_identity() -> tuple[bool, str]:
    ok = ifs.check_digit_set_identity(256)
    return ok, "" if ok else "{t_(k,n)} and {1/q} differ for denominators <= 256"


def check_greedy_expansion() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    for _ in range(200):
        x = sampling.random_rational(rng, Fraction(0), expansion.BOUND)
        e = expansion.greedy_base8(x, 20)
        report = expansion.verify_expansion(e)
        if not report.ok:
            return False, f"x = {x}: {report.first_failure.detail}"
        if abs(x - expansion.partial_sum(e.digits)) > expansion.truncation_error_bound(20):
            return False, f"x = {x}: truncation error above (1/56)·8^-20"
    return True, "200 expansions"


def check_bounded_digits() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    bound = expansion.REMARK_MAX_DENOMINATOR
    for _ in range(200):
        x = sampling.random_rational(rng, Fraction(0), expansion.BOUND)
        e = expansion.greedy_base8(x, 20, max_denominator=bound)
        if any(d != 0 and not 7 <= d.denominator <= bound for d in e.digits):
            return False, f"x = {x} produced a digit outside {{0}} ∪ {{1/n : 7 <= n <= {bound}}}"
        if not expansion.verify_expansion(e).ok:
            return False, f"x = {x}: bounded expansion failed verification"
    return True, "200 bounded expansions"


def check_fibre_example() -> tuple[bool, str]:
    c = fibre.certify_fibre_point(Fraction(1, 448), Fraction(1, 2), 2)
    pairs = [(a.src, a.dst, a.digit) for a in c.assignment]
    ok = c.verified and c.exact and pairs == [(2, 5, Fraction(1, 112))]
    return ok, "" if ok else f"assignment {pairs} differs from [(2, 5, 1/112)]"


def check_fibre_random() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 2)
    for _ in range(20):
        x = sampling.random_terminating_x(rng, 2, 4)
        c = fibre.certify_fibre_point(x, Fraction(1, 2), 2)
        if not c.verified or not c.exact:
            return False, f"x = {x} did not certify exactly"
    return True, "20 certificates"


def _brute_force_xm(m: int, epsilon: Fraction) -> list[Fraction]:
    digits = [Fraction(0)] + ifs.digit_values(epsilon)
    sums = {interior.digit_sum(choice) for choice in product(digits, repeat=m)}
    return sorted(s for s in sums if 0 < s < 1)


def check_xm_oracle() -> tuple[bool, str]:
    for m in (1, 2):
        for epsilon in (Fraction(1), Fraction(1, 2), Fraction(1, 4)):
            got = interior.enumerate_xm(Fraction(0), Fraction(1), m, epsilon).elements
            if got != _brute_force_xm(m, epsilon):
                return False, f"m={m}, eps={epsilon}: enumeration differs from brute force"
    return True, "m <= 2, eps in {1, 1/2, 1/4}"


def check_padding_lemma() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 3)
    for _ in range(200):
        m = int(rng.integers(1, 6))
        epsilon = Fraction(1, int(rng.integers(1, 40)))
        digits = [sampling.random_digit(rng) for _ in range(m)]
        shift = interior.digit_sum(digits) - interior.digit_sum(interior.truncate_digits(digits, epsilon))
        if not 0 <= shift <= interior.padding_delta(m, epsilon):
            return False, f"digits {digits} moved by {shift} at eps={epsilon}"
    return True, "200 draws"


def check_gap_example() -> tuple[bool, str]:
    g = interior.find_gap(Fraction(3, 10), Fraction(9, 20), 1)
    ok = (g.inner.lo, g.inner.hi) == (Fraction(29, 80), Fraction(31, 80)) and interior.verify_gap(g).ok
    return ok, "" if ok else f"inner gap ({g.inner.lo}, {g.inner.hi}) differs from (29/80, 31/80)"


def check_witness() -> tuple[bool, str]:
    w = interior.witness_empty_interior(
        Interval(lo=Fraction(3, 10), hi=Fraction(9, 20)),
        Interval(lo=Fraction(1, 2), hi=Fraction(3, 4)),
    )
    report = interior.verify_witness(w, samples=2000, seed=SEED)
    return report.ok, "" if report.ok else report.first_failure.detail


def check_binomial_values() -> tuple[bool, str]:
    expected = {1: Fraction(1, 2), 2: Fraction(1, 4), 5: Fraction(3, 16)}
    for n, value in expected.items():
        if measure.binom_fail_prob(n) != value:
            return False, f"failProb({n}) = {measure.binom_fail_prob(n)}, expected {value}"
    counts = measure.fail_counts(60)
    for n in range(1, 61):
        if counts[n - 1] != measure.fail_count(n):
            return False, f"Pascal recurrence disagrees with direct sum at n = {n}"
    return True, "n = 1, 2, 5 and recurrence up to 60"


def check_measure() -> tuple[bool, str]:
    if not measure.domination_lemma_holds():
        return False, "theta^5 <= rho^5 fails"
    if measure.an_lower_bound(10, 200).an_lower != 0:
        return False, "anLower(10, 200) should be 0"
    c = measure.an_lower_bound(400, 1000)
    return c.positive, "" if c.positive else "no positive area bound at N = 400, M = 1000"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "digit-set identity": check_digit_set_identity,
    "greedy expansion": check_greedy_expansion,
    "bounded digit set": check_bounded_digits,
    "fibre worked example": check_fibre_example,
    "fibre random x": check_fibre_random,
    "X_m oracle equivalence": check_xm_oracle,
    "padding lemma": check_padding_lemma,
    "gap worked example": check_gap_example,
    "witness soundness": check_witness,
    "binomial exact values": check_binomial_values,
    "measure positivity": check_measure,
}


def run_selftest(stop_on_failure: bool = False) -> list[SelfTestResult]:
    """
    Run every check in CHECKS.

    An exception inside a check counts as that check failing.

    Returns:
        list of SelfTestResult in CHECKS order
    """
    results = []
    for name, check in CHECKS.items():
        start = time.perf_counter()
        try:
            ok, detail = check()
        except (FractalError, AssertionError) as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start
        results.append(SelfTestResult(name=name, ok=ok, detail=detail, elapsed_seconds=elapsed))
        logger.info("selftest %-24s %s (%.2fs)", name, "ok" if ok else "FAILED", elapsed)
        if not ok and stop_on_failure:
            break
    return results


def first_failure(results: list[SelfTestResult]) -> SelfTestResult | None:
    return next((r for r in results if not r.ok), None)
