"""Command-line entry point.

Verbs: run, matrix, replay-check, serve, list-scenarios.
Exit codes: 0 success, 2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, ScenarioConfig
from .orchestrate import ROW_META, run, run_matrix, replay_check
from .server import ConsoleServer

SCENARIO_SUMMARIES = {
    0: "attack-free control run",
    1: "solo implant, countdown-timer trigger, no coordination",
    2: "solo implant, orbit-detect trigger, no coordination",
    3: "trigger + attack agents coordinating over the software bus, timer trigger",
    4: "trigger + attack agents coordinating over the software bus, orbit-detect trigger",
    5: "trigger + attack agents coordinating over a named FIFO, orbit-detect trigger",
}


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="PATH", help="scenario config JSON")
    parser.add_argument("--scenario", type=int, metavar="N", help="scenario id 0-5")
    parser.add_argument("--defenses", metavar="LIST", help="comma list: rate,acl,syscall")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--ticks", type=int, metavar="N", help="run length in ticks")
    parser.add_argument("--out", metavar="PATH", help="write the JSON document here")


def _load_config(args) -> ScenarioConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise _IoFailure(f"cannot read {args.config}: {exc}") from exc
        config = ScenarioConfig.from_json(text)
    else:
        config = ScenarioConfig()
    overrides = {}
    if args.scenario is not None:
        overrides["scenario"] = args.scenario
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.ticks is not None:
        overrides["run_ticks"] = args.ticks
    if args.defenses is not None:
        overrides["defenses"] = tuple(d for d in args.defenses.split(",") if d)
    if overrides:
        config = config.with_overrides(**overrides)
    config.validate()
    return config


class _IoFailure(Exception):
    pass


def _emit(doc: dict, out_path: str | None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        try:
            with open(out_path, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise _IoFailure(f"cannot write {out_path}: {exc}") from exc
    else:
        print(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="satsim",
        description="Deterministic flight-software attack/defense simulator",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="execute one scenario and emit its report")
    _add_common(p_run)

    p_matrix = sub.add_parser("matrix", help="scenario x countermeasure grid")
    _add_common(p_matrix)

    p_replay = sub.add_parser("replay-check", help="run twice and compare log digests")
    _add_common(p_replay)

    p_serve = sub.add_parser("serve", help="paced live session for operator consoles")
    _add_common(p_serve)
    p_serve.add_argument("--port", type=int, default=5050, metavar="N")
    p_serve.add_argument("--host", default="127.0.0.1", metavar="ADDR")

    sub.add_parser("list-scenarios", help="describe scenario ids")

    args = parser.parse_args(argv)

    try:
        if args.verb == "list-scenarios":
            for sid, text in SCENARIO_SUMMARIES.items():
                meta = ROW_META.get(sid)
                suffix = f"  [{meta[0]} / {meta[1]} / {meta[2]}]" if meta else ""
                print(f"{sid}: {text}{suffix}")
            return 0

        config = _load_config(args)

        if args.verb == "run":
            result = run(config)
            _emit(result.report, args.out)
        elif args.verb == "matrix":
            _emit(run_matrix(config), args.out)
        elif args.verb == "replay-check":
            identical = replay_check(config)
            print(f"replay-identical: {str(identical).lower()}")
        elif args.verb == "serve":
            server = ConsoleServer(config, args.host, args.port)
            print(f"serving scenario {config.scenario} on {args.host}:{server.port}", flush=True)
            result = server.serve()
            _emit(result.report, args.out)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _IoFailure as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
