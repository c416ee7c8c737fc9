from contextlib import asynccontextmanager
from datetime import datetime
from fractions import Fraction

from fastapi import FastAPI, HTTPException

from src import expansion, fibre, ifs, interior, measure
from src.config import configure_logging, load_settings
from src.errors import (
    ConfigError,
    GapNotFoundError,
    InvalidArgumentError,
    MatchingInfeasibleError,
    ResourceLimitError,
)
from src.models import Interval
from src.rationals import format_rational, parse_rational

# the HTTP surface never runs long falsification loops
MAX_WITNESS_SAMPLES = 10_000
MAX_MEASURE_CUTOFF = 20_000


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Load settings once per process and configure logging"""
    app.state.settings = load_settings()
    configure_logging(app.state.settings)
    yield


app = FastAPI(
    title="Fractal Interior API",
    description="Exact certificates for a self-similar set of positive area with empty interior",
    version="1.0.0",
    lifespan=lifespan,
)


def _rational(name: str, value: str) -> Fraction:
    try:
        return parse_rational(value)
    except InvalidArgumentError as e:
        raise HTTPException(status_code=400, detail=f"{name}: {e}")


def _certified(payload: dict) -> dict:
    return {**payload, "retrieved_at": datetime.now().isoformat()}


def _http_error(e: Exception) -> HTTPException:
    if isinstance(e, (InvalidArgumentError, ConfigError)):
        return HTTPException(status_code=400, detail=str(e))
    if isinstance(e, (MatchingInfeasibleError, GapNotFoundError)):
        return HTTPException(status_code=409, detail=str(e))
    if isinstance(e, ResourceLimitError):
        return HTTPException(status_code=422, detail=str(e))
    raise e


@app.get("/health")
async def health_check():
    """
    Health check endpoint to verify the API is running.

    Returns:
        dict: Status and timestamp
    """
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "service": "Fractal Interior API",
    }


@app.get("/api/expand")
async def get_expansion(x: str, length: int = 20, max_denominator: int | None = None):
    """
    Greedy base-8 expansion of x with its exact verification.

    Args:
        x: rational in [0, 1/56] as "p/q" or a decimal string
        length: number of digits (1 .. 1000)
        max_denominator: optional digit denominator bound (>= 56)
    """
    if length < 1 or length > 1000:
        raise HTTPException(status_code=400, detail="length must be between 1 and 1000")
    value = _rational("x", x)
    try:
        e = expansion.greedy_base8(value, length, max_denominator)
    except Exception as error:
        raise _http_error(error)
    report = expansion.verify_expansion(e)
    return _certified({
        "expansion": e.model_dump(mode="json"),
        "verification": report.model_dump(mode="json"),
    })


@app.get("/api/fibre")
async def get_fibre_certificate(x: str, y: str, N: int, windows: int | None = None):
    """
    Certificate that x lies in the fibre K_y.

    Returns 409 when the window matching runs out of zero positions.
    """
    x_value, y_value = _rational("x", x), _rational("y", y)
    try:
        c = fibre.certify_fibre_point(x_value, y_value, N, windows)
    except Exception as error:
        raise _http_error(error)
    return _certified(c.model_dump(mode="json"))


@app.get("/api/gap")
async def get_gap(a: str, b: str, m: int, min_width: str | None = None):
    """Certified gap of X_m inside (a, b); 409 when none is found above the epsilon floor"""
    lo, hi = _rational("a", a), _rational("b", b)
    width = _rational("min_width", min_width) if min_width is not None else None
    try:
        g = interior.find_gap(lo, hi, m, width)
    except Exception as error:
        raise _http_error(error)
    return _certified({**g.model_dump(mode="json"), "transcript": interior.gap_transcript(g)})


@app.get("/api/witness")
async def get_witness(i_lo: str, i_hi: str, j_lo: str, j_hi: str, samples: int = 0, seed: int = 0):
    """
    Rectangle inside I x J that misses K, re-verified before it is returned.

    Args:
        i_lo, i_hi: the x-interval I inside (0, 1)
        j_lo, j_hi: the dyadic y-interval J
        samples: falsification samples (0 .. 10000)
    """
    if samples < 0 or samples > MAX_WITNESS_SAMPLES:
        raise HTTPException(status_code=400, detail=f"samples must be between 0 and {MAX_WITNESS_SAMPLES}")
    I = Interval(lo=_rational("i_lo", i_lo), hi=_rational("i_hi", i_hi))
    J = Interval(lo=_rational("j_lo", j_lo), hi=_rational("j_hi", j_hi))
    try:
        w = interior.witness_empty_interior(I, J)
    except Exception as error:
        raise _http_error(error)
    report = interior.verify_witness(w, samples=samples, seed=seed)
    return _certified({
        **w.model_dump(mode="json"),
        "verification": report.model_dump(mode="json"),
        "transcript": interior.witness_transcript(w),
    })


@app.get("/api/measure")
async def get_measure(N: int, M: int):
    """Certified lower bound for L(A_N) and the area of K"""
    if M > MAX_MEASURE_CUTOFF:
        raise HTTPException(status_code=400, detail=f"M must be at most {MAX_MEASURE_CUTOFF}")
    try:
        c = measure.an_lower_bound(N, M)
    except Exception as error:
        raise _http_error(error)
    return _certified(c.model_dump(mode="json"))


@app.get("/api/cover")
async def get_cover(m: int, epsilon: str):
    """
    Triangles of the epsilon-truncated depth-m cover, sorted by apex.

    Returns 422 when the word count exceeds FRACTAL_WORD_LIMIT.
    """
    eps = _rational("epsilon", epsilon)
    try:
        triangles = ifs.cover(m, eps)
    except Exception as error:
        raise _http_error(error)
    return _certified({
        "m": m,
        "epsilon": format_rational(eps),
        "triangles": [t.model_dump(mode="json") for t in triangles],
        "count": len(triangles),
    })


if __name__ == "__main__":
    import uvicorn

    settings = load_settings()
    uvicorn.run("src.api:app", host=settings.api_host, port=settings.api_port, reload=True)
