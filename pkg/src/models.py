from fractions import Fraction
from typing import Annotated, Literal

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    model_serializer,
    model_validator,
)

from src.rationals import Rational, format_rational, is_unit_fraction


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def _check_digit(value: Fraction) -> Fraction:
    if value != 0 and not is_unit_fraction(value):
        raise ValueError(f"digit {format_rational(value)} is neither 0 nor 1/q")
    return value


def _check_epsilon(value: Fraction) -> Fraction:
    if not 0 < value <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {format_rational(value)}")
    return value


# A digit of the family: 0 or some t_{k,n} = 1/(2^k n), i.e. 0 or 1/q
DigitChoice = Annotated[Rational, AfterValidator(_check_digit)]


# --- ifs-core ---------------------------------------------------------------

class MapDescriptor(FrozenModel):
    op: Literal["U", "D0", "D"]
    k: int | None = None
    n: int | None = None

    @model_validator(mode="after")
    def _check_indices(self):
        if self.op == "D":
            if self.k is None or self.n is None:
                raise ValueError("D maps need both k and n")
            if self.k < 0 or self.n < 1:
                raise ValueError(f"D({self.k},{self.n}) needs k >= 0 and n >= 1")
        elif self.k is not None or self.n is not None:
            raise ValueError(f"{self.op} takes no indices")
        return self

    @model_serializer
    def _serialize(self):
        if self.op == "D":
            return {"op": "D", "k": self.k, "n": self.n}
        return {"op": self.op}

    @property
    def is_up(self) -> bool:
        return self.op == "U"

    @property
    def translation(self) -> Fraction:
        """Horizontal translation added before halving x (0 for U and D0)"""
        if self.op == "D":
            return Fraction(1, (1 << self.k) * self.n)
        return Fraction(0)

    def label(self) -> str:
        return f"D({self.k},{self.n})" if self.op == "D" else self.op


Word = tuple[MapDescriptor, ...]


class Point(FrozenModel):
    x: Rational
    y: Rational


class Triangle(FrozenModel):
    """Image of Δ: v0, v1, v2 are the images of (0,0), (1,0) and the apex (0,1)"""
    v0: Point
    v1: Point
    v2: Point

    @property
    def apex(self) -> Point:
        return self.v2

    @property
    def leg(self) -> Fraction:
        return self.v1.x - self.v0.x


class StripInterval(FrozenModel):
    lo: Rational
    hi: Rational


# --- expansion ---------------------------------------------------------------

class GreedyExpansion(FrozenModel):
    x: Rational
    digits: list[Rational]
    remainders: list[Rational]
    max_denominator: int | None = None

    @computed_field
    @property
    def remainder(self) -> Rational:
        return self.remainders[-1] if self.remainders else self.x

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def terminated(self) -> bool:
        return self.remainder == 0


class SparseEntry(FrozenModel):
    position: int
    value: Rational


class SparseBase2(FrozenModel):
    offset: int
    entries: list[SparseEntry]

    def value(self) -> Fraction:
        return sum((e.value / (1 << e.position) for e in self.entries), Fraction(0))


# --- fibre-certifier -----------------------------------------------------------

class BinaryExpansion(FrozenModel):
    y: Rational
    digits: list[int]

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def last_one(self) -> int:
        """Position of the last digit 1 (0 when y = 0); all later digits are 0"""
        for i in range(len(self.digits), 0, -1):
            if self.digits[i - 1] == 1:
                return i
        return 0

    def digit(self, i: int) -> int:
        return self.digits[i - 1] if i <= len(self.digits) else 0

    def zeros_through(self, n: int) -> list[int]:
        """Positions i <= n with a_i = 0 (the tail beyond the stored digits is zero)"""
        return [i for i in range(1, n + 1) if self.digit(i) == 0]


class ANMembership(FrozenModel):
    y: Rational
    N: int
    horizon: int
    verdict: bool
    trace: list[int] = Field(description="zero counts for n = N .. horizon")
    first_failure: int | None = None


class WindowRecord(FrozenModel):
    k: int
    positions: list[int]
    selection: list[int]
    available: int
    density_bound_holds: bool


class Assignment(FrozenModel):
    src: int
    dst: int
    digit: DigitChoice


class FibreCertificate(FrozenModel):
    y: Rational
    N: int
    x: Rational
    sparse: SparseBase2
    windows: list[WindowRecord]
    assignment: list[Assignment]
    truncation: int | None = None
    verified: bool = False

    @property
    def exact(self) -> bool:
        return self.truncation is None


# --- interior-witness -----------------------------------------------------------

class Interval(FrozenModel):
    lo: Rational
    hi: Rational

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains_open(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


class TruncatedXm(FrozenModel):
    m: int
    epsilon: Rational
    window: Interval
    elements: list[Rational]
    nodes: int = 0

    @computed_field
    @property
    def delta(self) -> Rational:
        return self.epsilon * (1 - Fraction(1, 1 << self.m))


class GapCertificate(FrozenModel):
    m: int
    epsilon: Rational
    delta: Rational
    outer: Interval
    inner: Interval

    @computed_field
    @property
    def width(self) -> Rational:
        return self.inner.width


class Rectangle(FrozenModel):
    x_lo: Rational
    x_hi: Rational
    y_lo: Rational
    y_hi: Rational


class InteriorWitness(FrozenModel):
    I: Interval
    J: Interval
    word: list[int]
    m: int
    x: Rational
    r: Rational
    rectangle: Rectangle
    gap: GapCertificate


# --- measure-bound --------------------------------------------------------------

class BinomialFailProb(FrozenModel):
    n: int
    threshold: int = Field(description="largest zero count that still fails (5j < 2n)")
    value: Rational


class MeasureCertificate(FrozenModel):
    N: int
    M: int
    c: Rational
    rho: Rational
    exact_part: Rational
    tail_bound: Rational
    an_lower: Rational
    area_lower: Rational
    leading_term: BinomialFailProb = Field(description="failProb(N), the first term of the exact sum")
    spot_check: tuple[int, int]
    transcript: list[str]

    @property
    def positive(self) -> bool:
        return self.area_lower > 0


# --- verification ---------------------------------------------------------------

class VerificationFailure(FrozenModel):
    check: str
    index: int | None = None
    detail: str


class VerificationReport(FrozenModel):
    ok: bool
    checks: int
    failures: list[VerificationFailure] = []

    @property
    def first_failure(self) -> VerificationFailure | None:
        return self.failures[0] if self.failures else None


# --- cli-render -------------------------------------------------------------------

class Viewport(FrozenModel):
    x_lo: Rational = Fraction(0)
    y_lo: Rational = Fraction(0)
    x_hi: Rational = Fraction(1)
    y_hi: Rational = Fraction(1)


class CoverMode(FrozenModel):
    kind: Literal["cover"] = "cover"
    m: int
    epsilon: Annotated[Rational, AfterValidator(_check_epsilon)]


class CloudMode(FrozenModel):
    kind: Literal["cloud"] = "cloud"
    samples: int
    depth: int
    seed: int = 0


class RenderConfig(FrozenModel):
    width: int = 512
    height: int = 512
    viewport: Viewport = Viewport()
    mode: CoverMode | CloudMode = Field(discriminator="kind")
    variant: Literal["standard", "selfAffine"] = "standard"


class RunReport(FrozenModel):
    subcommand: str
    inputs: dict[str, str]
    outputs: list[str]
    exit_status: int
    elapsed_seconds: float


class SelfTestResult(FrozenModel):
    name: str
    ok: bool
    detail: str = ""
    elapsed_seconds: float = 0.0
