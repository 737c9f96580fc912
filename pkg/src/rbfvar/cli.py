"""Command-line entry point: ``rbfvar run`` and ``rbfvar validate``."""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import json
import sys

from rbfvar.errors import ConfigurationError
from rbfvar.experiment import expand_grid, load_config, run_sweep, write_csv, write_rows

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUN_FAILED = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbfvar",
        description="Meshfree RBF solvers for variational problems: experiment runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a config (list-valued fields define a sweep)")
    run.add_argument("--config", required=True, help="JSON experiment config")
    run.add_argument("--out", help="CSV output path (overrides the config's 'out')")
    run.add_argument(
        "--deterministic",
        action="store_true",
        help="pin BLAS to one thread so results are bit-reproducible",
    )
    run.add_argument("--quiet", action="store_true", help="suppress per-run progress lines")

    val = sub.add_parser("validate", help="parse a config and print the resolved grid")
    val.add_argument("--config", required=True, help="JSON experiment config")
    return parser


def _single_thread():
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=1)


def _progress_line(rec) -> str:
    if rec.ok:
        status = "ok" if rec.converged else "not converged"
        return (f"{rec.benchmark} N={rec.N} T={rec.T} beta={rec.beta}: "
                f"error={rec.error_rel_l2:.3e} iters={rec.iterations} {status} "
                f"({rec.runtime_ms:.0f} ms)")
    return f"{rec.benchmark} N={rec.N}: FAILED {rec.failure}"


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = args.out or cfg.out
    progress = None if args.quiet else (lambda r: print(_progress_line(r), file=sys.stderr))
    guard = _single_thread() if args.deterministic else contextlib.nullcontext()
    with guard:
        records = run_sweep(cfg, progress=progress)
    if out:
        write_csv(records, out)
    else:
        write_rows(records, sys.stdout)
    failed = [r for r in records if not r.ok]
    for rec in failed:
        if args.quiet:
            print(_progress_line(rec), file=sys.stderr)
    return EXIT_RUN_FAILED if failed else EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    grid = expand_grid(cfg)
    print(f"{len(grid)} run(s)")
    for point in grid:
        print(json.dumps({k: v for k, v in dataclasses.asdict(point).items() if v is not None}))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_validate(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
