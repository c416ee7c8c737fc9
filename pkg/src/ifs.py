"""
The map family Φ = {U, D0, D(k,n)} acting on the plane, exactly.

    U(x, y)      = (x/2, (y+1)/2)
    D0(x, y)     = (x/2, y/2)
    D(k,n)(x, y) = ((x + t)/2, y/2)   with t = t_{k,n} = 1/(2^k n)

A word (φ1, ..., φm) acts as φ1 ∘ ... ∘ φm: the first entry is the outermost
map, so φm is applied first. Geometry only depends on translation values, and
since 2^k·n runs over every positive integer the translations are exactly the
unit fractions 1/q. Enumerations therefore work over values and use the
canonical descriptor D(0, q) for 1/q.

D0 is the uniform limit of D(k,n) as t -> 0 but stays a separate generator
here; collapsing it into small-t descriptors would only merge equal values and
changes no statement about covers, strips or X_m.
"""

import json
import logging
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping, Sequence

from src.config import load_settings
from src.errors import InvalidArgumentError, ResourceLimitError
from src.models import MapDescriptor, Point, StripInterval, Triangle, Word
from src.rationals import format_rational, is_unit_fraction

logger = logging.getLogger(__name__)

UP = MapDescriptor(op="U")
DOWN = MapDescriptor(op="D0")

BASE_TRIANGLE = Triangle(
    v0=Point(x=0, y=0),
    v1=Point(x=1, y=0),
    v2=Point(x=0, y=1),
)


def digit_value(k: int, n: int) -> Fraction:
    """
    Translation t_{k,n} = 1/(2^k · n).

    Args:
        k: natural >= 0
        n: natural >= 1

    Returns:
        Fraction: exact value in lowest terms
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if k < 0:
        raise InvalidArgumentError(f"k must be >= 0, got {k}")
    return Fraction(1, (1 << k) * n)


def descriptor(k: int, n: int) -> MapDescriptor:
    digit_value(k, n)
    return MapDescriptor(op="D", k=k, n=n)


def descriptor_for_value(value: Fraction) -> MapDescriptor:
    """Canonical descriptor for a digit value: D0 for 0, D(0, q) for 1/q"""
    value = Fraction(value)
    if value == 0:
        return DOWN
    if not is_unit_fraction(value):
        raise InvalidArgumentError(f"{format_rational(value)} is not a digit of the family")
    return MapDescriptor(op="D", k=0, n=value.denominator)


def descriptors_for_value(value: Fraction) -> list[MapDescriptor]:
    """Every D(k,n) with t_{k,n} == value (the family is value-redundant)"""
    value = Fraction(value)
    if not is_unit_fraction(value):
        raise InvalidArgumentError(f"{format_rational(value)} is not a digit of the family")
    q = value.denominator
    result = []
    k = 0
    while q % (1 << k) == 0:
        result.append(MapDescriptor(op="D", k=k, n=q >> k))
        k += 1
    return result


def check_digit(value: Fraction) -> Fraction:
    value = Fraction(value)
    if value != 0 and not is_unit_fraction(value):
        raise InvalidArgumentError(f"{format_rational(value)} is neither 0 nor some t_(k,n)")
    return value


def digit_values(epsilon: Fraction) -> list[Fraction]:
    """
    Distinct nonzero digit values t >= epsilon, largest first.

    These are 1/q for q = 1 .. floor(1/epsilon).
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise InvalidArgumentError(f"epsilon must lie in (0, 1], got {format_rational(epsilon)}")
    return [Fraction(1, q) for q in range(1, int(1 / epsilon) + 1)]


def check_digit_set_identity(bound: int) -> bool:
    """
    {t_(k,n)} and {1/q} agree on every value with denominator <= bound.

    Both inclusions are checked: each t_(k,n) with 2^k n <= bound is some 1/q, and
    each 1/q is hit by some (k, n).
    """
    from_family = set()
    k = 0
    while (1 << k) <= bound:
        for n in range(1, bound // (1 << k) + 1):
            from_family.add(digit_value(k, n))
        k += 1
    unit_fractions = {Fraction(1, q) for q in range(1, bound + 1)}
    return from_family == unit_fractions


# --- maps and words ---

def apply_map(phi: MapDescriptor, p: Point) -> Point:
    if phi.is_up:
        return Point(x=p.x / 2, y=(p.y + 1) / 2)
    return Point(x=(p.x + phi.translation) / 2, y=p.y / 2)


def apply_word(word: Sequence[MapDescriptor], p: Point) -> Point:
    """Exact image of p under φ1 ∘ ... ∘ φm (last entry applied first)"""
    for phi in reversed(word):
        p = apply_map(phi, p)
    return p


def image_triangle(word: Sequence[MapDescriptor]) -> Triangle:
    return Triangle(
        v0=apply_word(word, BASE_TRIANGLE.v0),
        v1=apply_word(word, BASE_TRIANGLE.v1),
        v2=apply_word(word, BASE_TRIANGLE.v2),
    )


def strip_of(word: Sequence[MapDescriptor]) -> StripInterval:
    """
    Horizontal strip holding the image of Δ under the word.

    lo = Σ_{i: φ_i = U} 2^-i, hi = lo + 2^-m.
    """
    if not word:
        raise InvalidArgumentError("strip_of needs a word of length >= 1")
    lo = sum((Fraction(1, 1 << i) for i, phi in enumerate(word, start=1) if phi.is_up), Fraction(0))
    return StripInterval(lo=lo, hi=lo + Fraction(1, 1 << len(word)))


def triangle_contains(triangle: Triangle, p: Point) -> bool:
    """Closed point-in-triangle test for images of Δ (legs axis-aligned, apex on top)"""
    h = triangle.apex.y - p.y
    if h < 0 or h > triangle.leg:
        return False
    return triangle.apex.x <= p.x <= triangle.apex.x + h


def family(epsilon: Fraction) -> list[MapDescriptor]:
    """U, D0 and one canonical D per distinct translation value >= epsilon"""
    return [UP, DOWN] + [descriptor_for_value(v) for v in digit_values(epsilon)]


def word_count(m: int, epsilon: Fraction) -> int:
    return (2 + int(1 / Fraction(epsilon))) ** m


def cover_words(m: int, epsilon: Fraction, word_limit: int | None = None) -> Iterator[tuple[Word, Triangle]]:
    """
    Every word of the epsilon-truncated family of length m with its triangle.

    Raises ResourceLimitError before enumerating when (2 + floor(1/eps))^m
    exceeds the word limit.
    """
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    maps = family(epsilon)
    limit = word_limit if word_limit is not None else load_settings().word_limit
    count = word_count(m, epsilon)
    if count > limit:
        raise ResourceLimitError(
            f"cover(m={m}, eps={format_rational(epsilon)}) has {count} words, limit is {limit}",
            limit=limit,
            requested=count,
        )
    for word in product(maps, repeat=m):
        yield word, image_triangle(word)


def cover(m: int, epsilon: Fraction, word_limit: int | None = None) -> list[Triangle]:
    """
    The epsilon-truncated depth-m cover.

    All triangles (φ1 ∘ ... ∘ φm)(Δ) whose D entries have t >= epsilon,
    deduplicated and sorted by apex (y, then x). The untruncated cover contains
    K; each of its apex abscissae lies within epsilon·(1 - 2^-m) of a
    truncated one (see interior.padding_delta).

    Returns:
        list of Triangle
    """
    triangles = {triangle for _, triangle in cover_words(m, epsilon, word_limit)}
    result = sorted(triangles, key=lambda t: (t.apex.y, t.apex.x))
    logger.debug("cover(m=%d, eps=%s): %d triangles", m, format_rational(epsilon), len(result))
    return result


# --- digit-based sampling of K ---

def _binary_digit(a: Sequence[int], i: int) -> int:
    return a[i - 1] if i <= len(a) else 0


def sample_point(a: Sequence[int], d: Mapping[int, Fraction], depth: int) -> Point:
    """
    Point (Σ_{i in Z(a), i<=depth} d_i/2^i, Σ_{i<=depth} a_i/2^i) of K.

    Positions of a beyond its length count as 0, and zero positions without an
    entry in d take the digit 0. With that all-zero tail the point belongs to K
    itself and to the depth-`depth` approximant; any point of K sharing the
    prefix lies within sqrt(2)·2^-depth (squared bound: sample_distance_bound_sq).

    Args:
        a: binary prefix (0/1 entries)
        d: digit per zero position of a, keyed by position (1-based)
        depth: number of positions summed

    Returns:
        Point
    """
    for i, value in d.items():
        if not 1 <= i <= depth:
            raise InvalidArgumentError(f"digit position {i} outside 1..{depth}")
        if _binary_digit(a, i) == 1:
            raise InvalidArgumentError(f"digit supplied at position {i} where a_{i} = 1")
        check_digit(value)

    x = Fraction(0)
    y_numerator = 0
    for i in range(1, depth + 1):
        bit = _binary_digit(a, i)
        if bit not in (0, 1):
            raise InvalidArgumentError(f"a_{i} = {bit} is not a binary digit")
        y_numerator = 2 * y_numerator + bit
        if bit == 0:
            value = d.get(i, 0)
            if value:
                x += Fraction(value) / (1 << i)
    return Point(x=x, y=Fraction(y_numerator, 1 << depth))


def sample_distance_bound_sq(depth: int) -> Fraction:
    """Square of the sqrt(2)·2^-depth proximity bound"""
    return Fraction(2, 1 << (2 * depth))


def word_for_sample(a: Sequence[int], d: Mapping[int, Fraction], depth: int) -> Word:
    """The word whose image of (0,0) is sample_point(a, d, depth)"""
    word = []
    for i in range(1, depth + 1):
        if _binary_digit(a, i) == 1:
            word.append(UP)
        else:
            word.append(descriptor_for_value(d.get(i, 0)))
    return tuple(word)


# --- wire format ---

def parse_word(data: str | list) -> Word:
    """Read a word from its JSON form: [{"op":"U"}, {"op":"D","k":3,"n":14}, ...]"""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise InvalidArgumentError(f"word is not valid JSON: {e}") from None
    if not isinstance(data, list):
        raise InvalidArgumentError("a word must be a JSON array")
    try:
        return tuple(MapDescriptor.model_validate(entry) for entry in data)
    except ValueError as e:
        raise InvalidArgumentError(f"bad map descriptor: {e}") from None


def dump_word(word: Sequence[MapDescriptor]) -> str:
    return json.dumps([phi.model_dump() for phi in word])
