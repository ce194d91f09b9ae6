"""Command-line entry point.

    fpk-chaos run       --config run.cfg [--out DIR]
    fpk-chaos reference --config run.cfg [--out DIR]
    fpk-chaos mc        --config run.cfg [--out DIR]
    fpk-chaos compare   A.csv B.csv [--out DIR]
    fpk-chaos validate  [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
Failures print one ``error kind=<kind> reason=<text>`` line on stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .config import load
from .errors import ConfigError, FpkError, NumericalError, PrecisionError
from .reference_pde import compare
from .validation import format_report, run_validate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpk-chaos", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in pipeline.RUNNERS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True)
        s.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    s = sub.add_parser("compare")
    s.add_argument("candidate")
    s.add_argument("reference")
    s.add_argument("--out", default=None)
    s = sub.add_parser("validate")
    s.add_argument("--out", default=None)
    return p


def _run(args) -> int:
    cfg = load(args.config)
    out = Path(args.out or cfg.output_dir)
    surface = pipeline.RUNNERS[args.command](cfg)
    for path in pipeline.write_run(pipeline.OUTPUT_NAMES[args.command], surface, cfg, out):
        print(path)
    return EXIT_OK


def _compare(args) -> int:
    report = compare(pipeline.read_surface(args.candidate), pipeline.read_surface(args.reference))
    text = pipeline.format_metrics(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.txt").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def _validate(args) -> int:
    results = run_validate()
    text = format_report(results)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "validation.txt").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def _fail(kind: str, code: int, exc: BaseException) -> int:
    reason = " ".join(str(exc).split()) or type(exc).__name__
    print(f"error kind={kind} reason={reason}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = _parser().parse_args(argv)
    handler = {"compare": _compare, "validate": _validate}.get(args.command, _run)
    try:
        return handler(args)
    except (NumericalError, PrecisionError, np.linalg.LinAlgError) as exc:
        return _fail("numerical", EXIT_NUMERIC, exc)
    except (ConfigError, FpkError, ValueError) as exc:
        return _fail("config", EXIT_CONFIG, exc)
    except OSError as exc:
        return _fail("io", EXIT_IO, exc)
    except (ArithmeticError, FloatingPointError) as exc:
        return _fail("numerical", EXIT_NUMERIC, exc)


if __name__ == "__main__":
    sys.exit(main())
