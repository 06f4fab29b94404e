"""Command-line entry point: one subcommand per experiment.

    ehsim <experiment> [--config FILE] [--out DIR] [--duration MS] [--seed N]
    ehsim teleop --role {master,slave,demo} [--listen H:P | --connect H:P]

The config file path may also come from the EHSIM_CONFIG environment
variable; absent both, built-in defaults apply.  On success the summary
JSON is printed to stdout and the exit code is 0; on failure a single
machine-readable JSON error line goes to stderr and the exit code is
nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .config import ExperimentConfig, default_config, load_config
from .errors import SimError
from .experiments import EXPERIMENT_NAMES, run_experiment
from .teleop import live

CONFIG_ENV_VAR = "EHSIM_CONFIG"


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR} or built-ins)")
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--duration", type=float, default=None, help="override run duration, ms")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehsim",
        description="Electrohydraulic kinesthetic haptic device simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENT_NAMES:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_common(p)
    p = sub.add_parser("teleop", help="teleoperation endpoints (live sockets or demo)")
    _add_common(p)
    p.add_argument("--role", choices=("master", "slave", "demo"), required=True)
    p.add_argument("--listen", help="slave: HOST:PORT to listen on")
    p.add_argument("--connect", help="master: HOST:PORT to connect to")
    p.add_argument("--object", default=None, help="slave/demo: virtual object label")
    return parser


def _load(args) -> ExperimentConfig:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if path:
        return load_config(path)
    return default_config()


def _run_teleop(args, cfg: ExperimentConfig) -> dict:
    if args.role == "demo":
        return run_experiment("teleop-demo", cfg, args.out,
                              duration=args.duration, seed=args.seed)
    if args.role == "slave":
        if not args.listen:
            raise SimError("--listen HOST:PORT is required for the slave role")

        def announce(host, port):
            print(f"listening on {host}:{port}", flush=True)

        return live.serve_slave(cfg, args.listen, object_label=args.object,
                                duration_ms=args.duration, on_listening=announce)
    if not args.connect:
        raise SimError("--connect HOST:PORT is required for the master role")
    duration = args.duration if args.duration is not None else cfg.experiments.teleop_demo.duration
    return live.run_master(cfg, args.connect, duration, Path(args.out))


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "teleop":
            summary = _run_teleop(args, cfg)
        else:
            summary = run_experiment(args.command, cfg, args.out,
                                     duration=args.duration, seed=args.seed)
    except SimError as e:
        cause = e.__cause__
        print(json.dumps({
            "error": type(cause if cause is not None else e).__name__,
            "command": args.command,
            "message": str(e),
        }), file=sys.stderr)
        return 1
    except OSError as e:
        print(json.dumps({
            "error": type(e).__name__,
            "command": args.command,
            "message": str(e),
        }), file=sys.stderr)
        return 1
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
