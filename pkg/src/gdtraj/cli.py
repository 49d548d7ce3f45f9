"""Command-line entry point.

    gdtraj <command> --config PATH [--seed U64] [--out DIR] [--workers N]

Commands: proximity, lowerbound, gn, generalize, rates.  Flags override the
corresponding config keys; the GDTRAJ_WORKERS environment variable sits
between the flag and the config for worker-count resolution
(flag > env > config > 1).

Exit codes: 0 all gates pass, 2 configuration error, 3 gate/invariant
failure, 4 numeric fault during descent.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import load_config
from .errors import ConfigurationError, InvariantFailure, NumericFault
from .runner import COMMANDS

WORKERS_ENV = "GDTRAJ_WORKERS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gdtraj",
        description="subgradient-descent trajectory experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0] if fn.__doc__ else None)
        p.add_argument("--config", required=True, help="key = value config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the base seed (unsigned 64-bit)")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="override the worker-process count")
    return parser


def resolve_workers(flag: int | None, config_value: int | None) -> int:
    """flag > GDTRAJ_WORKERS > config > 1; must resolve to >= 1."""
    if flag is None:
        env = os.environ.get(WORKERS_ENV)
        if env is not None:
            try:
                flag = int(env)
            except ValueError as exc:
                raise ConfigurationError(
                    f"{WORKERS_ENV} must be an integer, got {env!r}"
                ) from exc
    if flag is None:
        flag = config_value if config_value is not None else 1
    if flag < 1:
        raise ConfigurationError("worker count must be >= 1")
    return flag


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.experiment is not None and cfg.experiment != args.command:
            raise ConfigurationError(
                f"config declares experiment = {cfg.experiment!r} but the "
                f"{args.command!r} command was invoked"
            )
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["out"] = args.out
        if overrides:
            cfg = replace(cfg, **overrides)
        workers = resolve_workers(args.workers, cfg.workers)
        return COMMANDS[args.command](cfg, workers=workers)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 3
    except NumericFault as exc:
        print(f"numeric fault: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
