"""
Certified gaps in X_m and explicit rectangles disjoint from K.

X_m is the set of apex abscissae Σ_{i<=m} d_i/2^i of depth-m cover triangles.
Only finitely many digits are >= epsilon; dropping the others moves a sum by at
most delta = epsilon·(1 - 2^-m), so an open interval free of the truncated set
stays free of the full X_m once delta is shaved off each end.

A witness for (I, J), J = (Σ a_i/2^i, + 2^-m), places R just below the top of
J over a certified gap. Any triangle of the strip has apex (q, top) with q in
X_m, spans [q, q + h] at depth h below the top, and meets R only when
q lies in the shadow (x - 2r/3, x + r/3). The shadow sits inside the gap, so
no cover triangle and hence no point of K reaches R.
"""

import logging
from fractions import Fraction
from typing import Sequence

import numpy as np

from src import ifs, sampling
from src.config import load_settings
from src.digitsums import DigitSumSet
from src.errors import GapNotFoundError, InvalidArgumentError
from src.models import (
    GapCertificate,
    InteriorWitness,
    Interval,
    Rectangle,
    TruncatedXm,
    VerificationFailure,
    VerificationReport,
)
from src.rationals import format_rational

logger = logging.getLogger(__name__)

# coarsest epsilon find_gap starts from
START_EPSILON = Fraction(1, 8)
# extra binary digits below the strip used by falsification samples
SAMPLE_EXTRA_DEPTH = 20


def padding_delta(m: int, epsilon: Fraction) -> Fraction:
    """delta = epsilon·(1 - 2^-m), the largest shift caused by dropping digits < epsilon"""
    return Fraction(epsilon) * (1 - Fraction(1, 1 << m))


def truncate_digits(digits: Sequence[Fraction], epsilon: Fraction) -> list[Fraction]:
    """Replace every digit below epsilon by 0"""
    return [d if d >= epsilon else Fraction(0) for d in digits]


def digit_sum(digits: Sequence[Fraction]) -> Fraction:
    """Σ d_i / 2^i"""
    return sum((Fraction(d) / (1 << i) for i, d in enumerate(digits, start=1)), Fraction(0))


def _check_m(m: int):
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")


def _xm_search(m: int, epsilon: Fraction, node_budget: int | None) -> DigitSumSet:
    budget = node_budget if node_budget is not None else load_settings().node_budget
    weights = [Fraction(1, 1 << i) for i in range(1, m + 1)]
    return DigitSumSet(weights, ifs.digit_values(epsilon), budget, zero=Fraction(0))


def enumerate_xm(a: Fraction, b: Fraction, m: int, epsilon: Fraction, node_budget: int | None = None) -> TruncatedXm:
    """
    Elements of the epsilon-truncated X_m strictly inside (a, b), sorted.

    Raises:
        InvalidArgumentError: a >= b, m < 1 or epsilon outside (0, 1]
        ResourceLimitError: the branch-and-bound exceeded its node budget
    """
    a, b, epsilon = Fraction(a), Fraction(b), Fraction(epsilon)
    if a >= b:
        raise InvalidArgumentError(f"empty window ({format_rational(a)}, {format_rational(b)})")
    _check_m(m)
    search = _xm_search(m, epsilon, node_budget)
    elements = search.enumerate(a, b)
    return TruncatedXm(
        m=m,
        epsilon=epsilon,
        window=Interval(lo=a, hi=b),
        elements=elements,
        nodes=search.nodes,
    )


def _initial_epsilon(m: int, span: Fraction, min_width: Fraction, floor: Fraction) -> Fraction:
    epsilon = START_EPSILON
    while epsilon >= floor and 2 * padding_delta(m, epsilon) + min_width >= span:
        epsilon /= 2
    return epsilon


def _widest_gap(points: list[Fraction], needed: Fraction) -> tuple[Fraction, Fraction] | None:
    best = None
    for g0, g1 in zip(points, points[1:]):
        width = g1 - g0
        if width > needed and (best is None or width > best[1] - best[0]):
            best = (g0, g1)
    return best


def find_gap(
    a: Fraction,
    b: Fraction,
    m: int,
    min_width: Fraction | None = None,
    *,
    epsilon_floor: Fraction | None = None,
    node_budget: int | None = None,
) -> GapCertificate:
    """
    An open interval inside (a, b) certified disjoint from the full X_m.

    Starts at the coarsest epsilon = 2^-j <= 1/8 whose padding fits the window and
    halves epsilon until the truncated X_m (window edges included as
    pseudo-elements) has an outer gap wider than 2·delta + min_width. The widest
    such gap is taken, leftmost on ties.

    Args:
        a, b: window, a < b
        m: depth
        min_width: required inner width (default FRACTAL_GAP_MIN_WIDTH·(b - a))
        epsilon_floor: smallest epsilon tried (default FRACTAL_EPSILON_FLOOR)
        node_budget: branch-and-bound budget per enumeration

    Raises:
        GapNotFoundError: epsilon dropped below the floor without a gap
    """
    a, b = Fraction(a), Fraction(b)
    if a >= b:
        raise InvalidArgumentError(f"empty window ({format_rational(a)}, {format_rational(b)})")
    _check_m(m)
    settings = load_settings()
    span = b - a
    min_width = Fraction(min_width) if min_width is not None else settings.gap_min_width * span
    if min_width <= 0:
        raise InvalidArgumentError(f"min_width must be positive, got {format_rational(min_width)}")
    floor = Fraction(epsilon_floor) if epsilon_floor is not None else settings.epsilon_floor
    budget = node_budget if node_budget is not None else settings.node_budget

    epsilon = _initial_epsilon(m, span, min_width, floor)
    while epsilon >= floor:
        delta = padding_delta(m, epsilon)
        xm = enumerate_xm(a, b, m, epsilon, budget)
        outer = _widest_gap([a] + xm.elements + [b], 2 * delta + min_width)
        logger.debug("find_gap m=%d eps=%s: %d elements, %s", m, format_rational(epsilon),
                     len(xm.elements), "gap" if outer else "no gap")
        if outer is not None:
            g0, g1 = outer
            certificate = GapCertificate(
                m=m,
                epsilon=epsilon,
                delta=delta,
                outer=Interval(lo=g0, hi=g1),
                inner=Interval(lo=g0 + delta, hi=g1 - delta),
            )
            logger.info("gap (%s, %s) certified at eps=%s",
                        format_rational(certificate.inner.lo), format_rational(certificate.inner.hi),
                        format_rational(epsilon))
            return certificate
        epsilon /= 2

    raise GapNotFoundError(
        f"no gap of width > {format_rational(min_width)} in ({format_rational(a)}, {format_rational(b)}) "
        f"for m={m} before epsilon reached {format_rational(floor)}",
        last_epsilon=epsilon * 2,
    )


def verify_gap(g: GapCertificate, node_budget: int | None = None) -> VerificationReport:
    """Re-check the padding arithmetic and re-enumerate the outer gap (it must be empty)"""
    failures: list[VerificationFailure] = []

    if g.m < 1 or not 0 < g.epsilon <= 1:
        failures.append(VerificationFailure(check="parameters", detail="m >= 1 and epsilon in (0, 1] required"))
        return VerificationReport(ok=False, checks=1, failures=failures)
    if g.delta != padding_delta(g.m, g.epsilon):
        failures.append(VerificationFailure(
            check="padding", detail=f"delta = {format_rational(g.delta)} but epsilon·(1 - 2^-m) = "
                                    f"{format_rational(padding_delta(g.m, g.epsilon))}",
        ))
    if g.inner.lo != g.outer.lo + g.delta or g.inner.hi != g.outer.hi - g.delta:
        failures.append(VerificationFailure(check="padding", detail="inner is not outer shrunk by delta"))
    if g.inner.lo >= g.inner.hi:
        failures.append(VerificationFailure(check="inner-nonempty", detail="outer gap is not wider than 2·delta"))
    if g.outer.lo < g.outer.hi:
        inside = enumerate_xm(g.outer.lo, g.outer.hi, g.m, g.epsilon, node_budget).elements
        if inside:
            failures.append(VerificationFailure(
                check="outer-empty",
                detail=f"{format_rational(inside[0])} of truncated X_{g.m} lies in the outer gap",
            ))
    return VerificationReport(ok=not failures, checks=4, failures=failures)


# --- witnesses ---------------------------------------------------------------

def dyadic_word(J: Interval) -> list[int]:
    """The binary word a with J = (Σ a_i/2^i, + 2^-m); raises unless J has that form"""
    width = J.hi - J.lo
    if width <= 0 or width.numerator != 1 or width.denominator & (width.denominator - 1):
        raise InvalidArgumentError(
            f"J = ({format_rational(J.lo)}, {format_rational(J.hi)}) does not have width 2^-m"
        )
    m = width.denominator.bit_length() - 1
    if m < 1:
        raise InvalidArgumentError("J must be a proper dyadic subinterval of (0, 1) (m >= 1)")
    scaled = J.lo * (1 << m)
    if scaled.denominator != 1 or not 0 <= scaled < (1 << m):
        raise InvalidArgumentError(
            f"J.lo = {format_rational(J.lo)} is not a multiple of 2^-{m} inside [0, 1)"
        )
    value = scaled.numerator
    return [(value >> (m - i)) & 1 for i in range(1, m + 1)]


def witness_rectangle(x: Fraction, r: Fraction, top: Fraction) -> Rectangle:
    return Rectangle(x_lo=x - r / 3, x_hi=x + r / 3, y_lo=top - r / 3, y_hi=top)


def witness_empty_interior(
    I: Interval,
    J: Interval,
    min_width: Fraction | None = None,
    *,
    epsilon_floor: Fraction | None = None,
    node_budget: int | None = None,
) -> InteriorWitness:
    """
    An open rectangle R inside I × J with R ∩ K = ∅.

    x is the midpoint of the certified inner gap and r = min(width/2, 2^-(m+1)),
    so (x - r, x + r) sits inside the gap and r < 2^-m.

    Raises:
        InvalidArgumentError: I not inside (0, 1) or J not dyadic
        GapNotFoundError: propagated from find_gap
    """
    if not 0 <= I.lo < I.hi <= 1:
        raise InvalidArgumentError(
            f"I = ({format_rational(I.lo)}, {format_rational(I.hi)}) must be a nondegenerate subinterval of (0, 1)"
        )
    word = dyadic_word(J)
    m = len(word)
    gap = find_gap(I.lo, I.hi, m, min_width, epsilon_floor=epsilon_floor, node_budget=node_budget)

    x = (gap.inner.lo + gap.inner.hi) / 2
    r = min(gap.inner.width / 2, Fraction(1, 1 << (m + 1)))
    witness = InteriorWitness(
        I=I,
        J=J,
        word=word,
        m=m,
        x=x,
        r=r,
        rectangle=witness_rectangle(x, r, J.hi),
        gap=gap,
    )
    logger.info("witness for strip %s: x=%s r=%s", "".join(map(str, word)), format_rational(x), format_rational(r))
    return witness


def triangle_meets_box(q: Fraction, top: Fraction, leg: Fraction, box: Rectangle) -> bool:
    """
    Does the closed triangle with apex (q, top), horizontal leg `leg` and vertical
    leg down to top - leg meet the open box?

    With Y from max(y_lo, top - leg) to min(y_hi, top), the triangle's widest row
    in that band is at the bottom and spans [q, q + top - Ylow].
    """
    y_low = max(box.y_lo, top - leg)
    y_high = min(box.y_hi, top)
    if y_low >= y_high:
        return False
    return max(box.x_lo, q) < min(box.x_hi, q + top - y_low)


def shadow_interval(rectangle: Rectangle, top: Fraction, leg: Fraction) -> Interval | None:
    """
    Apex abscissae q whose triangle (apex (q, top), legs `leg`) meets the open box.

    It is the open interval (x_lo - (top - Ylow), x_hi), or None when the box
    misses the triangles' vertical range altogether.
    """
    y_low = max(rectangle.y_lo, top - leg)
    if y_low >= min(rectangle.y_hi, top):
        return None
    return Interval(lo=rectangle.x_lo - (top - y_low), hi=rectangle.x_hi)


def verify_witness(w: InteriorWitness, samples: int = 0, seed: int = 0, node_budget: int | None = None) -> VerificationReport:
    """
    Exactly re-check an InteriorWitness, then falsification-test it.

    The falsification part draws `samples` points of K with y-prefix w.word and
    full-range random digits (numpy default_rng(seed)); half of them have y forced
    into the rectangle's height band. Any sample inside R is a failure.
    """
    failures: list[VerificationFailure] = []
    checks = 0

    def check(name: str, ok: bool, detail: str):
        nonlocal checks
        checks += 1
        if not ok:
            failures.append(VerificationFailure(check=name, detail=detail))

    leg = Fraction(1, 1 << w.m)
    top = w.J.hi
    strip_lo = sum((Fraction(bit, 1 << i) for i, bit in enumerate(w.word, start=1)), Fraction(0))
    check("strip", len(w.word) == w.m and w.J.lo == strip_lo and top - w.J.lo == leg,
          "J is not (Σ a_i/2^i, + 2^-m) for the recorded word")
    check("radius", 0 < w.r < leg, f"r = {format_rational(w.r)} is not in (0, 2^-{w.m})")
    around = Interval(lo=w.x - w.r, hi=w.x + w.r)
    check("inside-I", w.I.contains_open(around), "(x - r, x + r) is not inside I")
    check("gap-contains", w.gap.m == w.m and w.gap.inner.contains_open(around),
          "gap.inner does not contain (x - r, x + r)")

    gap_report = verify_gap(w.gap, node_budget)
    checks += gap_report.checks
    failures.extend(
        VerificationFailure(check=f"gap/{f.check}", index=f.index, detail=f.detail) for f in gap_report.failures
    )

    R = w.rectangle
    check("rectangle", R == witness_rectangle(w.x, w.r, top),
          "R is not (x - r/3, x + r/3) × (top - r/3, top)")
    check("rectangle-in-strip", w.J.lo <= R.y_lo < R.y_hi <= top and w.I.lo <= R.x_lo < R.x_hi <= w.I.hi,
          "R does not sit inside I × J below the strip top")

    shadow = shadow_interval(R, top, leg)
    check("apex-geometry", shadow is None or around.contains_open(shadow),
          "some apex outside (x - r, x + r) has a triangle meeting R")

    if samples > 0 and not failures:
        rng = np.random.default_rng(seed)
        hits = 0
        for p in sampling.attractor_samples(rng, w.word, samples, w.m + SAMPLE_EXTRA_DEPTH, (R.y_lo, R.y_hi)):
            if R.x_lo < p.x < R.x_hi and R.y_lo < p.y < R.y_hi:
                hits += 1
                if hits == 1:
                    failures.append(VerificationFailure(
                        check="falsification",
                        detail=f"sample ({format_rational(p.x)}, {format_rational(p.y)}) lies in R",
                    ))
        checks += 1
        logger.info("falsification: %d samples, %d inside R", samples, hits)

    return VerificationReport(ok=not failures, checks=checks, failures=failures)


# --- transcripts ----------------------------------------------------------------

def _interval(i: Interval) -> str:
    return f"({format_rational(i.lo)}, {format_rational(i.hi)})"


def gap_transcript(g: GapCertificate) -> list[str]:
    return [
        f"depth m = {g.m}, digits truncated at epsilon = {format_rational(g.epsilon)}",
        f"outer gap {_interval(g.outer)} holds no sum Σ d_i/2^i with every d_i in {{0}} ∪ {{1/q >= epsilon}}",
        f"dropping digits below epsilon moves a sum by at most delta = epsilon·(1 - 2^-m) = {format_rational(g.delta)}",
        f"so the inner gap {_interval(g.inner)} of width {format_rational(g.width)} misses the full X_{g.m}",
    ]


def witness_transcript(w: InteriorWitness) -> list[str]:
    R = w.rectangle
    shadow = shadow_interval(R, w.J.hi, Fraction(1, 1 << w.m))
    lines = [
        f"strip J = {_interval(w.J)} has word a = {''.join(map(str, w.word))}, m = {w.m}",
        *gap_transcript(w.gap),
        f"centre x = {format_rational(w.x)}, radius r = {format_rational(w.r)} < 2^-{w.m}",
        f"R = ({format_rational(R.x_lo)}, {format_rational(R.x_hi)}) × ({format_rational(R.y_lo)}, {format_rational(R.y_hi)})",
    ]
    if shadow is not None:
        lines.append(
            f"a strip triangle with apex (q, {format_rational(w.J.hi)}) meets R only if q ∈ {_interval(shadow)}"
        )
    lines.append("that interval lies in (x - r, x + r) ⊂ gap, which holds no apex, so R ∩ K = ∅")
    return lines
