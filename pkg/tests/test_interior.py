from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from src import ifs, interior, sampling
from src.errors import GapNotFoundError, InvalidArgumentError
from src.interior import enumerate_xm, find_gap, verify_gap, verify_witness, witness_empty_interior
from src.models import Interval

FIXTURE_I = Interval(lo=Fraction(3, 10), hi=Fraction(9, 20))
FIXTURE_J = Interval(lo=Fraction(1, 2), hi=Fraction(3, 4))


def brute_force_xm(m, epsilon):
    digits = [Fraction(0)] + ifs.digit_values(epsilon)
    return sorted({interior.digit_sum(c) for c in product(digits, repeat=m)} - {Fraction(0)})


@pytest.fixture(scope="module")
def fixture_witness():
    return witness_empty_interior(FIXTURE_I, FIXTURE_J)


def test_enumerate_examples():
    got = enumerate_xm(Fraction(0), Fraction(1), 1, Fraction(1, 8)).elements
    assert got == sorted(Fraction(1, 2 * q) for q in range(1, 9))

    assert enumerate_xm(Fraction(3, 10), Fraction(9, 20), 1, Fraction(1, 1000)).elements == []

    got = enumerate_xm(Fraction(0), Fraction(1), 2, Fraction(1, 2)).elements
    assert got == [Fraction(k, 8) for k in (1, 2, 3, 4, 5, 6)]


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("epsilon", [Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 12)])
def test_enumerate_matches_brute_force(m, epsilon):
    expected = [s for s in brute_force_xm(m, epsilon) if s < 1]
    assert enumerate_xm(Fraction(0), Fraction(1), m, epsilon).elements == expected


def test_padding_lemma():
    """Dropping digits below epsilon moves a sum by at most epsilon·(1 - 2^-m)"""
    rng = np.random.default_rng(7)
    for _ in range(2000):
        m = int(rng.integers(1, 8))
        epsilon = Fraction(1, int(rng.integers(1, 200)))
        digits = [sampling.random_digit(rng) for _ in range(m)]
        truncated = interior.truncate_digits(digits, epsilon)
        shift = interior.digit_sum(digits) - interior.digit_sum(truncated)
        assert 0 <= shift <= interior.padding_delta(m, epsilon), f"digits {digits}, eps {epsilon}"


def test_find_gap_worked_example():
    g = find_gap(Fraction(3, 10), Fraction(9, 20), 1)
    assert g.epsilon == Fraction(1, 8) and g.delta == Fraction(1, 16)
    assert (g.outer.lo, g.outer.hi) == (Fraction(3, 10), Fraction(9, 20))
    assert (g.inner.lo, g.inner.hi) == (Fraction(29, 80), Fraction(31, 80))
    assert verify_gap(g).ok
    assert g.model_dump()["inner"] == {"lo": "29/80", "hi": "31/80"}


def test_find_gap_beyond_range():
    g = find_gap(Fraction(2), Fraction(3), 3)
    assert (g.outer.lo, g.outer.hi) == (Fraction(2), Fraction(3))


def test_find_gap_near_accumulation_point():
    """0 is a limit of 1/(2q); no gap touching 0 can be certified"""
    with pytest.raises(GapNotFoundError) as info:
        find_gap(Fraction(0), Fraction(1, 1000), 1, epsilon_floor=Fraction(1, 16384))
    assert info.value.last_epsilon >= Fraction(1, 16384)


def test_find_gap_rejects_bad_window():
    with pytest.raises(InvalidArgumentError):
        find_gap(Fraction(1, 2), Fraction(1, 2), 1)
    with pytest.raises(InvalidArgumentError):
        find_gap(Fraction(0), Fraction(1), 1, Fraction(0))


def test_gap_soundness_random_draws():
    """10^5 sums with full-range digits never land in the certified inner gap"""
    g = find_gap(FIXTURE_I.lo, FIXTURE_I.hi, 2)
    rng = np.random.default_rng(8)
    for _ in range(100_000):
        s = interior.digit_sum([sampling.random_digit(rng), sampling.random_digit(rng)])
        assert not g.inner.lo < s < g.inner.hi, f"{s} lies in the gap"


def test_verify_gap_flags_tampering():
    g = find_gap(Fraction(3, 10), Fraction(9, 20), 1)
    wide = g.model_copy(update={"outer": Interval(lo=Fraction(1, 5), hi=g.outer.hi),
                                "inner": Interval(lo=Fraction(1, 5) + g.delta, hi=g.inner.hi)})
    assert any(f.check == "outer-empty" for f in verify_gap(wide).failures)
    assert not verify_gap(g.model_copy(update={"delta": Fraction(1, 20)})).ok


def test_witness_fixture(fixture_witness):
    """Strip (1,0) at m = 2: the widest gap is (3/8, 5/12), certified at eps = 1/64"""
    w = fixture_witness
    print(f"  x = {w.x}, r = {w.r}, eps = {w.gap.epsilon}")

    assert w.word == [1, 0] and w.m == 2
    assert (w.gap.outer.lo, w.gap.outer.hi) == (Fraction(3, 8), Fraction(5, 12))
    assert w.gap.epsilon == Fraction(1, 64)
    assert w.x == Fraction(19, 48) and w.r == Fraction(7, 768)
    assert w.r < Fraction(1, 4)
    assert FIXTURE_I.lo < w.x - w.r and w.x + w.r < FIXTURE_I.hi
    assert w.rectangle.y_hi == Fraction(3, 4)
    assert verify_witness(w).ok


def test_witness_falsification(fixture_witness):
    """10^5 points of K in the strip (1,0) never fall inside R"""
    report = verify_witness(fixture_witness, samples=100_000, seed=9)
    assert report.ok, report.first_failure


def test_apex_geometry_case_analysis(fixture_witness):
    """Triangles with apex outside (x - r, x + r) miss R; the centre's own triangle would not"""
    w = fixture_witness
    leg = Fraction(1, 4)
    top = w.J.hi
    outside = [w.x - w.r, w.x - w.r - Fraction(1, 1000), Fraction(0), w.x + w.r, w.x + w.r + Fraction(1, 7), Fraction(1)]
    for q in outside:
        assert not interior.triangle_meets_box(q, top, leg, w.rectangle), f"apex {q} meets R"
    assert interior.triangle_meets_box(w.x, top, leg, w.rectangle)
    shadow = interior.shadow_interval(w.rectangle, top, leg)
    assert (shadow.lo, shadow.hi) == (w.x - 2 * w.r / 3, w.x + w.r / 3)


def test_witness_preconditions():
    with pytest.raises(InvalidArgumentError):
        witness_empty_interior(Interval(lo=Fraction(2), hi=Fraction(3)), Interval(lo=Fraction(0), hi=Fraction(1, 2)))
    with pytest.raises(InvalidArgumentError):
        witness_empty_interior(FIXTURE_I, Interval(lo=Fraction(1, 3), hi=Fraction(2, 3)))
    with pytest.raises(InvalidArgumentError):
        witness_empty_interior(FIXTURE_I, Interval(lo=Fraction(1, 8), hi=Fraction(3, 8)))


def test_verify_witness_flags_tampering(fixture_witness):
    w = fixture_witness

    big_radius = w.model_copy(update={"r": Fraction(1, 4)})
    assert any(f.check == "radius" for f in verify_witness(big_radius).failures)

    lift = w.r / 3
    shifted = w.model_copy(update={"rectangle": w.rectangle.model_copy(
        update={"y_lo": w.rectangle.y_lo + lift, "y_hi": w.rectangle.y_hi + lift})})
    checks = {f.check for f in verify_witness(shifted).failures}
    assert "rectangle" in checks and "rectangle-in-strip" in checks

    off_centre = w.model_copy(update={"x": w.gap.inner.lo})
    assert any(f.check == "gap-contains" for f in verify_witness(off_centre).failures)


def test_transcripts(fixture_witness):
    lines = interior.witness_transcript(fixture_witness)
    assert lines[0].startswith("strip J = (1/2, 3/4) has word a = 10")
    assert any("R ∩ K = ∅" in line for line in lines)
