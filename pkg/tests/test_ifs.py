from fractions import Fraction

import numpy as np
import pytest

from src import ifs, sampling
from src.errors import InvalidArgumentError, ResourceLimitError
from src.models import MapDescriptor, Point

D = ifs.descriptor


def test_digit_values():
    """t_(k,n) = 1/(2^k n) in lowest terms"""
    assert ifs.digit_value(0, 1) == 1
    assert ifs.digit_value(1, 1) == ifs.digit_value(0, 2) == Fraction(1, 2)
    assert D(1, 1) != D(0, 2), "equal values must keep distinct descriptors"
    assert ifs.digit_value(3, 14) == Fraction(1, 112)

    with pytest.raises(InvalidArgumentError):
        ifs.digit_value(2, 0)


def test_apply_word():
    """The first entry of a word is the outermost map"""
    origin = Point(x=0, y=0)
    assert ifs.apply_word([ifs.UP], origin) == Point(x=0, y=Fraction(1, 2))
    assert ifs.apply_word([D(0, 1)], origin) == Point(x=Fraction(1, 2), y=0)
    assert ifs.apply_word([ifs.UP, D(3, 14)], Point(x=0, y=1)) == Point(x=Fraction(1, 448), y=Fraction(3, 4))


def test_strip_of():
    assert ifs.strip_of([ifs.UP]).model_dump() == {"lo": "1/2", "hi": "1/1"}
    assert ifs.strip_of([ifs.DOWN]).hi == Fraction(1, 2)
    strip = ifs.strip_of([ifs.UP, ifs.DOWN, ifs.UP])
    assert (strip.lo, strip.hi) == (Fraction(5, 8), Fraction(3, 4))

    with pytest.raises(InvalidArgumentError):
        ifs.strip_of([])


def test_strip_matches_triangle_extent():
    """The y-extent of every image triangle is exactly its strip"""
    for word, triangle in ifs.cover_words(2, Fraction(1, 3)):
        strip = ifs.strip_of(word)
        ys = [triangle.v0.y, triangle.v1.y, triangle.v2.y]
        assert (min(ys), max(ys)) == (strip.lo, strip.hi), f"strip mismatch for {ifs.dump_word(word)}"
        assert triangle.leg == Fraction(1, 4)


def test_cover_m1():
    apexes = [(t.apex.x, t.apex.y) for t in ifs.cover(1, Fraction(1))]
    assert apexes == [(0, Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2)), (0, 1)]
    assert len(ifs.cover(1, Fraction(1, 2))) == 4


def test_cover_inside_base_triangle_and_nested():
    """Every depth-2 triangle sits in Δ and inside some depth-1 triangle"""
    epsilon = Fraction(1, 3)
    parents = ifs.cover(1, epsilon)
    for triangle in ifs.cover(2, epsilon):
        corners = [triangle.v0, triangle.v1, triangle.v2]
        assert all(ifs.triangle_contains(ifs.BASE_TRIANGLE, p) for p in corners)
        assert any(all(ifs.triangle_contains(parent, p) for p in corners) for parent in parents), \
            f"triangle with apex {triangle.apex} has no parent"


def test_cover_word_limit():
    with pytest.raises(ResourceLimitError) as info:
        ifs.cover(4, Fraction(1, 16), word_limit=1000)
    assert info.value.requested == 18 ** 4


def test_word_count():
    assert ifs.word_count(4, Fraction(1, 16)) == len(ifs.family(Fraction(1, 16))) ** 4 == 18 ** 4
    assert ifs.word_count(1, Fraction(1)) == len(ifs.cover(1, Fraction(1))) == 3


def test_maps_halve_distances():
    """Each map is a similarity of ratio 1/2"""
    p, q = Point(x=Fraction(1, 3), y=Fraction(1, 5)), Point(x=Fraction(2, 7), y=Fraction(4, 9))

    def dist_sq(a, b):
        return (a.x - b.x) ** 2 + (a.y - b.y) ** 2

    for phi in (ifs.UP, ifs.DOWN, D(2, 3)):
        assert dist_sq(ifs.apply_map(phi, p), ifs.apply_map(phi, q)) == dist_sq(p, q) / 4


def test_digit_set_identity():
    assert ifs.check_digit_set_identity(300)
    assert [d.label() for d in ifs.descriptors_for_value(Fraction(1, 12))] == ["D(0,12)", "D(1,6)", "D(2,3)"]
    assert ifs.descriptor_for_value(Fraction(0)) == ifs.DOWN


def test_sample_point_examples():
    assert ifs.sample_point([1] * 6, {}, 6) == Point(x=0, y=1 - Fraction(1, 64))
    all_ones = {i: Fraction(1) for i in range(1, 7)}
    assert ifs.sample_point([0] * 6, all_ones, 6) == Point(x=1 - Fraction(1, 64), y=0)
    assert ifs.sample_point([1, 0, 0], {2: Fraction(1, 112)}, 3) == Point(x=Fraction(1, 448), y=Fraction(1, 2))


def test_sample_point_rejects_digits_on_ones():
    with pytest.raises(InvalidArgumentError):
        ifs.sample_point([1, 0], {1: Fraction(1, 2)}, 2)
    with pytest.raises(InvalidArgumentError):
        ifs.sample_point([0, 0], {1: Fraction(2, 3)}, 2)


def test_samples_lie_in_their_word_triangle():
    """A depth-m sample is the image of (0,0) under its word, so it lies in that word's triangle"""
    rng = np.random.default_rng(11)
    for _ in range(200):
        depth = int(rng.integers(1, 8))
        bits = sampling.random_bits(rng, depth)
        digits = {i: sampling.random_digit(rng) for i in range(1, depth + 1) if bits[i - 1] == 0}
        point = ifs.sample_point(bits, digits, depth)
        word = ifs.word_for_sample(bits, digits, depth)
        assert ifs.apply_word(word, Point(x=0, y=0)) == point
        assert ifs.triangle_contains(ifs.image_triangle(word), point)


def test_deeper_samples_stay_close():
    """Extending a prefix moves the sample by at most sqrt(2)·2^-depth"""
    rng = np.random.default_rng(12)
    for _ in range(200):
        depth = int(rng.integers(1, 10))
        bits = sampling.random_bits(rng, depth + 12)
        digits = {i: sampling.random_digit(rng) for i in range(1, depth + 13) if bits[i - 1] == 0}
        coarse = ifs.sample_point(bits[:depth], {i: d for i, d in digits.items() if i <= depth}, depth)
        fine = ifs.sample_point(bits, digits, depth + 12)
        distance_sq = (fine.x - coarse.x) ** 2 + (fine.y - coarse.y) ** 2
        assert distance_sq <= ifs.sample_distance_bound_sq(depth), f"depth {depth}"


def test_word_json_round_trip():
    word = (ifs.UP, ifs.DOWN, D(3, 14))
    text = ifs.dump_word(word)
    assert text == '[{"op": "U"}, {"op": "D0"}, {"op": "D", "k": 3, "n": 14}]'
    assert ifs.parse_word(text) == word

    with pytest.raises(InvalidArgumentError):
        ifs.parse_word('[{"op": "D", "k": 1}]')
    with pytest.raises(InvalidArgumentError):
        ifs.parse_word('[{"op": "U", "k": 1, "n": 1}]')
    assert MapDescriptor(op="D", k=0, n=5).translation == Fraction(1, 5)
