"""Command-line batch driver.

Exit codes: 0 when every certificate passes, 1 when any fails (or, with
``--strict``, when any warning was raised), 2 on configuration or model errors.
Nothing is written on exit code 2.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import WickFockError
from .scenario import Scenario, bundled_scenarios, run_all, write_outputs

log = logging.getLogger("wickfock")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wickfock", description=(
        "Run certificate suites for smeared Wick squares on truncated Fock spaces "
        "and write CSV/JSON reports."))
    p.add_argument("config", nargs="*",
                   help="scenario INI files or bundled scenario names (default: all bundled)")
    p.add_argument("--out", default=os.environ.get("WICKFOCK_OUT", "wickfock-out"),
                   help="output directory (env WICKFOCK_OUT)")
    p.add_argument("--seed", type=int, default=None, help="override every scenario's probe seed")
    p.add_argument("--workers", type=int, default=int(os.environ.get("WICKFOCK_WORKERS", "1")),
                   help="scenarios run concurrently (env WICKFOCK_WORKERS)")
    p.add_argument("--list-scenarios", action="store_true", help="list bundled scenarios and exit")
    p.add_argument("--strict", action="store_true", help="treat warnings as failures")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.list_scenarios:
        for name in bundled_scenarios():
            print(name)
        return 0
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return 2
    refs = args.config or list(bundled_scenarios())
    try:
        scenarios = [Scenario.load(r) for r in refs]
        run = run_all(scenarios, seed=args.seed, workers=args.workers, strict=args.strict)
    except WickFockError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for res in run.results:
        for rep in res.reports:
            print(f"{res.scenario.name}: {rep}")
        for w in res.warnings:
            print(f"{res.scenario.name}: warning: {w}")
    paths = write_outputs(run, args.out)
    log.info("wrote %s", ", ".join(str(p) for p in paths))
    print("all certificates passed" if run.passed else "certificate failures (see report.csv)")
    return run.exit_code


if __name__ == "__main__":
    sys.exit(main())
