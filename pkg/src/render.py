"""
Rasterise depth-m covers and point clouds of K into plain PGM images.

Cover mode decides every pixel centre exactly. A centre (X, Y) in the strip of
a binary word a, at depth h = top - Y below the strip top, is inside some cover
triangle iff an apex q of that strip lies in [X - s·h, X], where s is the ratio
of the triangle's horizontal to vertical leg (1 for K). Apexes of the strip are
the digit sums over the zero positions of a, so each query is one
DigitSumSet.successor call and whole runs of lit or dark pixels are skipped at
once.

The self-affine variant scales x by 1/√2 and uses translations 1/(2^(k/2)·n).
Its values are irrational, so it runs in mpmath at FRACTAL_RENDER_PRECISION bits
and never produces certificates.
"""

import logging
import textwrap
from fractions import Fraction
from math import ceil, floor
from pathlib import Path

import mpmath
import numpy as np

from src import ifs, sampling
from src.config import load_settings
from src.digitsums import DigitSumSet
from src.errors import InvalidArgumentError, ResourceLimitError
from src.models import CloudMode, CoverMode, RenderConfig
from src.rationals import format_rational

logger = logging.getLogger(__name__)

BACKGROUND = 255
INK = 0
MAXVAL = 255
PGM_LINE_WIDTH = 70


class ExactArithmetic:
    """Fractions: the standard variant"""

    name = "standard"
    zero = Fraction(0)

    def num(self, value: Fraction):
        return Fraction(value)

    def floor(self, value) -> int:
        return floor(value)

    def ceil(self, value) -> int:
        return ceil(value)

    def weight(self, i: int):
        return Fraction(1, 1 << i)

    def digits(self, epsilon: Fraction) -> list:
        return ifs.digit_values(epsilon)

    def slope(self, m: int):
        """horizontal leg / vertical leg of a depth-m triangle"""
        return Fraction(1)

    def random_digit(self, rng: np.random.Generator):
        return sampling.random_digit(rng)


class SelfAffineArithmetic:
    """mpmath reals at a fixed binary precision"""

    name = "selfAffine"

    def __init__(self, precision: int):
        self.precision = precision
        self.zero = mpmath.mpf(0)
        self.root2 = mpmath.sqrt(2)

    def num(self, value: Fraction):
        value = Fraction(value)
        return mpmath.mpf(value.numerator) / value.denominator

    def floor(self, value) -> int:
        return int(mpmath.floor(value))

    def ceil(self, value) -> int:
        return int(mpmath.ceil(value))

    def weight(self, i: int):
        return self.root2 ** (-i)

    def digits(self, epsilon: Fraction) -> list:
        # t = 1/(2^(k/2) n): even k gives 1/q, odd k gives 1/(√2 q)
        values = [self.num(v) for v in ifs.digit_values(epsilon)]
        limit = 1 / Fraction(epsilon)
        q = 1
        while 2 * q * q <= limit * limit:
            values.append(1 / (self.root2 * q))
            q += 1
        return values

    def slope(self, m: int):
        return self.root2 ** m

    def random_digit(self, rng: np.random.Generator):
        value = sampling.random_digit(rng)
        if value and rng.random() < 0.5:
            return self.num(value) / self.root2
        return self.num(value)


class Raster:
    """Pixel centres of a viewport; row 0 is the top edge"""

    def __init__(self, config: RenderConfig, arithmetic):
        v = config.viewport
        if v.x_lo >= v.x_hi or v.y_lo >= v.y_hi:
            raise InvalidArgumentError("viewport must have x_lo < x_hi and y_lo < y_hi")
        self.width = config.width
        self.height = config.height
        self.viewport = v
        self.arithmetic = arithmetic
        self.x_lo = arithmetic.num(v.x_lo)
        self.dx = arithmetic.num((v.x_hi - v.x_lo) / config.width)
        self.dy = (v.y_hi - v.y_lo) / config.height

    def center_x(self, col: int):
        return self.x_lo + self.arithmetic.num(Fraction(2 * col + 1, 2)) * self.dx

    def center_y(self, row: int) -> Fraction:
        return self.viewport.y_hi - (row + Fraction(1, 2)) * self.dy

    def first_col_at_or_above(self, value) -> int:
        """Smallest column whose centre is >= value"""
        return max(0, self.arithmetic.ceil((value - self.x_lo) / self.dx - self.arithmetic.num(Fraction(1, 2))))

    def first_col_above(self, value) -> int:
        """Smallest column whose centre is > value"""
        return max(0, self.arithmetic.floor((value - self.x_lo) / self.dx - self.arithmetic.num(Fraction(1, 2))) + 1)

    def pixel_of(self, x, y) -> tuple[int, int] | None:
        col = self.arithmetic.floor((x - self.x_lo) / self.dx)
        row = floor((self.viewport.y_hi - Fraction(y)) / self.dy)
        if 0 <= col < self.width and 0 <= row < self.height:
            return row, col
        return None


def _arithmetic_for(config: RenderConfig):
    if config.variant == "selfAffine":
        return SelfAffineArithmetic(mpmath.mp.prec)
    return ExactArithmetic()


def _check_size(config: RenderConfig, pixel_limit: int):
    if config.width < 1 or config.height < 1:
        raise InvalidArgumentError(f"image size {config.width}x{config.height} must be positive")
    if config.width * config.height > pixel_limit:
        raise ResourceLimitError(
            f"{config.width}x{config.height} image exceeds the pixel limit {pixel_limit}",
            limit=pixel_limit,
            requested=config.width * config.height,
        )


def strips_containing(y: Fraction, m: int) -> list[int]:
    """Indices k of the closed strips [k/2^m, (k+1)/2^m] holding y"""
    if not 0 <= y <= 1:
        return []
    scaled = y * (1 << m)
    k = min(floor(scaled), (1 << m) - 1)
    found = [k]
    if scaled == k and k >= 1:
        found.append(k - 1)
    return found


def _strip_word(k: int, m: int) -> list[int]:
    return [(k >> (m - i)) & 1 for i in range(1, m + 1)]


def _render_cover(pixels: np.ndarray, raster: Raster, mode: CoverMode, node_budget: int):
    m = mode.m
    arithmetic = raster.arithmetic
    digits = arithmetic.digits(mode.epsilon)
    slope = arithmetic.slope(m)
    searches: dict[int, DigitSumSet] = {}

    for row in range(raster.height):
        y = raster.center_y(row)
        for k in strips_containing(y, m):
            if k not in searches:
                word = _strip_word(k, m)
                weights = [arithmetic.weight(i) for i in range(1, m + 1) if word[i - 1] == 0]
                searches[k] = DigitSumSet(weights, digits, node_budget, zero=arithmetic.zero)
            search = searches[k]
            top = Fraction(k + 1, 1 << m)
            span = arithmetic.num(top - y) * slope

            col = 0
            while col < raster.width:
                x = raster.center_x(col)
                q = search.successor(x - span)
                if q is None:
                    break
                if q <= x:
                    end = min(raster.width, raster.first_col_above(q + span))
                    pixels[row, col:end] = INK
                    col = max(end, col + 1)
                else:
                    col = max(raster.first_col_at_or_above(q), col + 1)
        if row % 64 == 0:
            logger.debug("cover render row %d/%d", row, raster.height)


def _render_cloud(pixels: np.ndarray, raster: Raster, mode: CloudMode):
    if mode.depth < 1:
        raise InvalidArgumentError(f"cloud depth must be >= 1, got {mode.depth}")
    rng = np.random.default_rng(mode.seed)
    arithmetic = raster.arithmetic
    for _ in range(mode.samples):
        bits = sampling.random_bits(rng, mode.depth)
        digits = {i: arithmetic.random_digit(rng) for i, bit in enumerate(bits, start=1) if bit == 0}
        if isinstance(arithmetic, ExactArithmetic):
            point = ifs.sample_point(bits, digits, mode.depth)
            x, y = point.x, point.y
        else:
            y = Fraction(int("".join(map(str, bits)), 2), 1 << mode.depth)
            x = sum((d * arithmetic.weight(i) for i, d in digits.items() if d), arithmetic.zero)
        pixel = raster.pixel_of(x, y)
        if pixel is not None:
            pixels[pixel] = INK


def render_image(config: RenderConfig, word_limit: int | None = None, pixel_limit: int | None = None) -> np.ndarray:
    """
    Render a cover or a point cloud to a uint8 array (height x width).

    Raises:
        ResourceLimitError: word-count or pixel limit exceeded
    """
    settings = load_settings()
    _check_size(config, pixel_limit if pixel_limit is not None else settings.pixel_limit)
    pixels = np.full((config.height, config.width), BACKGROUND, dtype=np.uint8)

    with mpmath.workprec(settings.render_precision):
        arithmetic = _arithmetic_for(config)
        raster = Raster(config, arithmetic)
        mode = config.mode
        if isinstance(mode, CoverMode):
            if mode.m < 1:
                raise InvalidArgumentError(f"m must be >= 1, got {mode.m}")
            limit = word_limit if word_limit is not None else settings.render_word_limit
            digit_count = len(arithmetic.digits(mode.epsilon))
            count = (2 + digit_count) ** mode.m
            if count > limit:
                raise ResourceLimitError(
                    f"cover(m={mode.m}, eps={format_rational(mode.epsilon)}) has {count} words, limit is {limit}",
                    limit=limit,
                    requested=count,
                )
            _render_cover(pixels, raster, mode, settings.node_budget)
        else:
            _render_cloud(pixels, raster, mode)

    lit = int((pixels == INK).sum())
    logger.info("rendered %s %s %dx%d: %d lit pixels", arithmetic.name, mode.kind, config.width, config.height, lit)
    return pixels


def to_pgm(pixels: np.ndarray) -> str:
    """Plain (P2) graymap text; every line stays within 70 characters"""
    height, width = pixels.shape
    lines = ["P2", f"{width} {height}", str(MAXVAL)]
    for row in pixels:
        lines.extend(textwrap.wrap(" ".join(str(int(v)) for v in row), width=PGM_LINE_WIDTH))
    return "\n".join(lines) + "\n"


def write_pgm(path: str | Path, pixels: np.ndarray) -> Path:
    path = Path(path)
    path.write_text(to_pgm(pixels), encoding="ascii")
    return path
