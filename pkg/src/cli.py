"""
fractal-interior command line.

    python -m src.cli render --mode cover --m 6 --epsilon 1/16 --out cover.pgm
    python -m src.cli expand --x 1/100 --length 20
    python -m src.cli fibre --x 1/448 --y 1/2 --N 2 --out fibre.json
    python -m src.cli gap --a 3/10 --b 9/20 --m 1
    python -m src.cli witness --I 3/10,9/20 --J 1/2,3/4 --samples 10000
    python -m src.cli measure --N 200 --M 5000
    python -m src.cli selftest

Certificates go to --out as JSON (stdout when omitted) and a proof transcript
is printed. Exit status: 0 verified, 1 verified false / infeasible / no claim,
2 usage or invalid input, 3 resource limit.
"""

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError

from src import expansion, fibre, interior, measure, render, selftest
from src.config import configure_logging, load_settings
from src.errors import (
    ConfigError,
    GapNotFoundError,
    InvalidArgumentError,
    MatchingInfeasibleError,
    ResourceLimitError,
)
from src.models import CloudMode, CoverMode, Interval, RenderConfig, RunReport, Viewport
from src.rationals import format_rational, parse_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def rational(text: str) -> Fraction:
    return parse_rational(text)


def rational_pair(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidArgumentError(f"expected 'lo,hi', got {text!r}")
    return parse_rational(parts[0]), parse_rational(parts[1])


def viewport(text: str) -> Viewport:
    parts = text.split(",")
    if len(parts) != 4:
        raise InvalidArgumentError(f"expected 'x_lo,y_lo,x_hi,y_hi', got {text!r}")
    x_lo, y_lo, x_hi, y_hi = (parse_rational(p) for p in parts)
    return Viewport(x_lo=x_lo, y_lo=y_lo, x_hi=x_hi, y_hi=y_hi)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractal-interior",
        description="Exact certificates and pictures for a self-similar set of positive area with empty interior.",
    )
    parser.add_argument("--report", type=Path, help="also write a JSON run report here")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="rasterise a cover or point cloud to a P2 graymap")
    p.add_argument("--mode", choices=["cover", "cloud"], default="cover")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--epsilon", type=rational, default=Fraction(1))
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--viewport", type=viewport, default=Viewport())
    p.add_argument("--variant", choices=["standard", "selfAffine"], default="standard")
    p.add_argument("--out", type=Path, default=Path("render.pgm"))

    p = sub.add_parser("expand", help="greedy base-8 expansion of x")
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--length", type=int, default=20)
    p.add_argument("--N", type=int, help="expand 2^N·x and print its sparse base-2 embedding")
    p.add_argument("--max-denominator", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("fibre", help="certify that x lies in the fibre K_y")
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--y", type=rational, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--windows", type=int, help="window budget (default FRACTAL_WINDOW_BUDGET)")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("gap", help="certify a gap of X_m inside (a, b)")
    p.add_argument("--a", type=rational, required=True)
    p.add_argument("--b", type=rational, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--min-width", type=rational)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("witness", help="rectangle inside I x J that misses K")
    p.add_argument("--I", dest="I", type=rational_pair, required=True, metavar="LO,HI")
    p.add_argument("--J", dest="J", type=rational_pair, required=True, metavar="LO,HI")
    p.add_argument("--samples", type=int, default=0, help="falsification samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("measure", help="certified lower bound for the area of K")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("selftest", help="run the desk-scale property suite")
    p.add_argument("--keep-going", action="store_true", help="run every check even after a failure")
    return parser


def _emit(payload: dict, out: Path | None, transcript: list[str]) -> list[str]:
    text = json.dumps(payload, indent=2)
    if out is None:
        print(text)
        return []
    out.write_text(text + "\n", encoding="utf-8")
    for line in transcript:
        print(line)
    print(f"certificate written to {out}")
    return [str(out)]


def cmd_render(args) -> tuple[int, list[str]]:
    if args.mode == "cover":
        mode = CoverMode(m=args.m, epsilon=args.epsilon)
    else:
        mode = CloudMode(samples=args.samples, depth=args.depth, seed=args.seed)
    config = RenderConfig(width=args.width, height=args.height, viewport=args.viewport, mode=mode, variant=args.variant)
    pixels = render.render_image(config)
    render.write_pgm(args.out, pixels)
    print(f"{args.variant} {args.mode} render {args.width}x{args.height} written to {args.out}")
    return EXIT_OK, [str(args.out)]


def cmd_expand(args) -> tuple[int, list[str]]:
    if args.N is None:
        e = expansion.greedy_base8(args.x, args.length, args.max_denominator)
        sparse = None
    else:
        e, sparse = expansion.sparse_expansion(args.x, args.N, args.length, args.max_denominator)
    report = expansion.verify_expansion(e)
    payload = {
        "expansion": e.model_dump(mode="json"),
        "sparse": sparse.model_dump(mode="json") if sparse is not None else None,
        "verification": report.model_dump(mode="json"),
    }
    transcript = [
        f"x = {format_rational(e.x)}, {e.length} greedy digits, remainder {format_rational(e.remainder)}",
        "digits: " + " ".join(format_rational(d) for d in e.digits),
        f"verification: {'ok' if report.ok else report.first_failure.detail}",
    ]
    return (EXIT_OK if report.ok else EXIT_FALSE), _emit(payload, args.out, transcript)


def cmd_fibre(args) -> tuple[int, list[str]]:
    try:
        c = fibre.certify_fibre_point(args.x, args.y, args.N, args.windows)
    except MatchingInfeasibleError as e:
        print(f"matching infeasible: {e}", file=sys.stderr)
        return EXIT_FALSE, []
    transcript = [
        f"y = {format_rational(c.y)} lies in A_{c.N}",
        *(f"W_{w.k} = {w.positions} matched to S_{w.k} = {w.selection} ({w.available} zeros available)"
          for w in c.windows if w.positions),
        *(f"d**_{a.src} = {format_rational(a.digit)} (from position {a.dst})" for a in c.assignment),
        "Σ d**_i/2^i = x exactly" if c.exact else f"Σ d**_i/2^i within 2^-{c.truncation} of x",
    ]
    return (EXIT_OK if c.verified else EXIT_FALSE), _emit(c.model_dump(mode="json"), args.out, transcript)


def cmd_gap(args) -> tuple[int, list[str]]:
    try:
        g = interior.find_gap(args.a, args.b, args.m, args.min_width)
    except GapNotFoundError as e:
        print(f"no gap: {e}", file=sys.stderr)
        return EXIT_FALSE, []
    report = interior.verify_gap(g)
    payload = {**g.model_dump(mode="json"), "transcript": interior.gap_transcript(g)}
    return (EXIT_OK if report.ok else EXIT_FALSE), _emit(payload, args.out, interior.gap_transcript(g))


def cmd_witness(args) -> tuple[int, list[str]]:
    I = Interval(lo=args.I[0], hi=args.I[1])
    J = Interval(lo=args.J[0], hi=args.J[1])
    try:
        w = interior.witness_empty_interior(I, J)
    except GapNotFoundError as e:
        print(f"no gap: {e}", file=sys.stderr)
        return EXIT_FALSE, []
    report = interior.verify_witness(w, samples=args.samples, seed=args.seed)
    transcript = interior.witness_transcript(w)
    payload = {
        **w.model_dump(mode="json"),
        "verification": report.model_dump(mode="json"),
        "transcript": transcript,
    }
    return (EXIT_OK if report.ok else EXIT_FALSE), _emit(payload, args.out, transcript)


def cmd_measure(args) -> tuple[int, list[str]]:
    c = measure.an_lower_bound(args.N, args.M)
    return (EXIT_OK if c.positive else EXIT_FALSE), _emit(c.model_dump(mode="json"), args.out, c.transcript)


def cmd_selftest(args) -> tuple[int, list[str]]:
    results = selftest.run_selftest(stop_on_failure=not args.keep_going)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<26} {r.elapsed_seconds:6.2f}s  {r.detail}")
    failed = selftest.first_failure(results)
    if failed is not None:
        print(f"first failing property: {failed.name}", file=sys.stderr)
        return EXIT_FALSE, []
    return EXIT_OK, []


COMMANDS = {
    "render": cmd_render,
    "expand": cmd_expand,
    "fibre": cmd_fibre,
    "gap": cmd_gap,
    "witness": cmd_witness,
    "measure": cmd_measure,
    "selftest": cmd_selftest,
}


def execute(args: argparse.Namespace) -> RunReport:
    """Run one parsed subcommand and describe the run; errors become exit statuses"""
    start = time.perf_counter()
    outputs: list[str] = []
    try:
        configure_logging(load_settings())
        status, outputs = COMMANDS[args.command](args)
    except (InvalidArgumentError, ConfigError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        status = EXIT_USAGE
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        status = EXIT_RESOURCE
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        status = EXIT_FALSE

    elapsed = time.perf_counter() - start
    logger.info("%s finished with exit status %d in %.2fs", args.command, status, elapsed)
    return RunReport(
        subcommand=args.command,
        inputs={k: str(v) for k, v in vars(args).items() if k not in ("command", "report") and v is not None},
        outputs=outputs,
        exit_status=status,
        elapsed_seconds=elapsed,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    report = execute(args)
    if args.report is not None:
        args.report.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
