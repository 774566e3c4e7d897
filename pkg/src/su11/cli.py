"""Command-line driver: sweeps, figure data, verification.

Exit codes: 0 success, 1 validation problem (arguments, config), 2 numerical
failure (verification criteria or unexpected arithmetic trouble).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from su11.sweeps import (
    FIGURES,
    FigureJob,
    parse_config,
    run_figure,
    run_sweep,
    to_csv,
)
from su11.verify import run_verify


def _cmd_sweep(args) -> int:
    try:
        text = Path(args.config).read_text()
        specs = parse_config(text)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if not specs:
        print("error: config contains no sweep sections", file=sys.stderr)
        return 1
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        table = run_sweep(spec)
        path = out_dir / f"{spec.name}.csv"
        path.write_text(to_csv(table))
        print(path)
    return 0


def _cmd_figure(args) -> int:
    try:
        job = FigureJob(args.figure_id, args.output or f"{args.figure_id}.csv")
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    table = run_figure(job)
    Path(job.output_path).write_text(to_csv(table))
    print(job.output_path)
    return 0


def _cmd_verify(args) -> int:
    results = run_verify(args.level)
    for result in results:
        print(result.line())
    n_failed = sum(not r.passed for r in results)
    print(f"{len(results) - n_failed}/{len(results)} criteria passed")
    return 0 if n_failed == 0 else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="su11",
        description=(
            "Phase sensitivity, QFI and metrological limits of an SU(1,1) "
            "interferometer with multiphoton output subtraction and photon loss."
        ),
        epilog="Set SU11_THREADS to cap sweep parallelism.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run every sweep section of a config file")
    p_sweep.add_argument("config", help="flat key = value config, one section per sweep")
    p_sweep.add_argument(
        "-o", "--output-dir", default=".", help="directory for <section>.csv files"
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fig = sub.add_parser(
        "figure", help=f"emit the data underlying a figure ({', '.join(sorted(FIGURES))})"
    )
    p_fig.add_argument("figure_id")
    p_fig.add_argument("-o", "--output", default=None, help="CSV path (default <id>.csv)")
    p_fig.set_defaults(func=_cmd_figure)

    p_verify = sub.add_parser("verify", help="run the acceptance criteria")
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")
    p_verify.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
