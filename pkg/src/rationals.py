"""
Exact rational codec.

Every certified quantity is a `fractions.Fraction`. On the wire a rational is the
string "p/q" in lowest terms with q > 0 ("0/1" for zero). Inputs may also be
integers or finite decimal strings ("0.375", "1e-3"), which are converted
exactly; anything that would need rounding (floats, nan, inf) is rejected.
"""

from fractions import Fraction
from typing import Annotated, Any

from pydantic import PlainSerializer, PlainValidator, WithJsonSchema

from src.errors import InvalidArgumentError

RATIONAL_PATTERN = r"^-?\d+/\d+$"


def parse_rational(value: Any) -> Fraction:
    """
    Convert a CLI/JSON value into an exact Fraction.

    Accepts Fraction, int, "p/q", integer strings and finite decimal strings.
    Floats are refused because their binary value is rarely what was typed.
    """
    if isinstance(value, bool):
        raise InvalidArgumentError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise InvalidArgumentError(
            f"float {value!r} refused; pass the exact value as a 'p/q' or decimal string"
        )
    if not isinstance(value, str):
        raise InvalidArgumentError(f"not a rational: {value!r}")

    text = value.strip()
    if not text:
        raise InvalidArgumentError("empty rational string")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise InvalidArgumentError(f"zero denominator in {value!r}") from None
    except ValueError:
        raise InvalidArgumentError(f"not an exact rational: {value!r}") from None


def format_rational(value: Fraction) -> str:
    """Render as "p/q" in lowest terms (Fraction keeps that normal form)"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def is_dyadic(value: Fraction) -> bool:
    denominator = Fraction(value).denominator
    return denominator & (denominator - 1) == 0


def dyadic_exponent(value: Fraction) -> int:
    """Return e with denominator == 2**e; raises for non-dyadic values"""
    if not is_dyadic(value):
        raise InvalidArgumentError(f"{format_rational(value)} is not dyadic")
    return Fraction(value).denominator.bit_length() - 1


def is_unit_fraction(value: Fraction) -> bool:
    """True for 1/q with q a positive integer"""
    value = Fraction(value)
    return value.numerator == 1 and value.denominator >= 1


Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
    WithJsonSchema({"type": "string", "pattern": RATIONAL_PATTERN}),
]
