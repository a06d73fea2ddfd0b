"""Command-line interface.

    swarmsim run <scenario> [--log PATH] [--seed N] [--speed F] [--script CMDFILE]
    swarmsim serve <scenario> --port P [--host H] [--static DIR]
    swarmsim replay <log>
    swarmsim export <log> --axis {x,y,z} [--out PATH]

<scenario> is a file path or the name of a bundled scenario.  Exit codes:
0 success, 1 engine halt or bad input, 2 run completed but logged
error-severity violations, 3 replay divergence.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .engine import SwarmCommand, run_scenario
from .errors import ReplayRefused, ScenarioError, SimulationHalt, SwarmSimError
from .scenario import build_context, load_command_script, load_scenario
from .telemetry import TelemetryLog, export_curves, replay

DEFAULT_PORT = int(os.environ.get("SWARMSIM_PORT", "8701"))


def _load(path_or_name: str, seed: int | None, speed: float | None):
    config = load_scenario(path_or_name)
    if seed is not None:
        config.doc["seed"] = seed
    if speed is not None:
        config.doc["speed_factor"] = speed
    for w in config.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return config


def cmd_run(args) -> int:
    config = _load(args.scenario, args.seed, args.speed)
    ctx = build_context(config)
    script = None
    if args.script:
        raw = load_command_script(args.script)
        script = {t: [SwarmCommand.from_payload(p) for p in cmds] for t, cmds in raw.items()}
    try:
        log = run_scenario(ctx, script=script)
    except SimulationHalt as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.log:
        log.write(args.log)
        print(f"log written to {args.log}")
    snaps = log.by_kind("snapshot")
    detections = log.by_kind("detection")
    errors = [e for e in log.events
              if e.kind == "violation" and e.payload.get("severity") == "error"]
    print(f"run complete: {snaps[-1].tick if snaps else 0} ticks, {len(log.events)} events")
    if detections:
        d = detections[0].payload
        print(f"detection: agent {d['agent'] + 1} at tick {d['tick']}")
    if errors:
        print(f"{len(errors)} violation(s) logged", file=sys.stderr)
        return 2
    return 0


def cmd_serve(args) -> int:
    from .gateway import serve

    config = _load(args.scenario, args.seed, None)
    static = Path(args.static) if args.static else None
    if static is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static = bundled if bundled.is_dir() else None
    if static is not None and not static.is_dir():
        print(f"error: static dir {static} not found", file=sys.stderr)
        return 1
    try:
        serve(config, port=args.port, host=args.host, static_dir=static)
    except SwarmSimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_replay(args) -> int:
    log = TelemetryLog.read(args.log)
    try:
        report = replay(log)
    except ReplayRefused as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if report.ok:
        print(f"replay ok: {report.ticks_compared} snapshots match")
        return 0
    print(f"replay DIVERGED: {report.divergence}", file=sys.stderr)
    return 3


def cmd_export(args) -> int:
    log = TelemetryLog.read(args.log)
    table = export_curves(log, args.axis)
    if args.out:
        Path(args.out).write_text(table)
        print(f"curves written to {args.out}")
    else:
        sys.stdout.write(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario headless")
    p.add_argument("scenario")
    p.add_argument("--log", help="write the telemetry log here")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--speed", type=float, default=None,
                   help="speed factor (sim s per wall s); 0 = free-run")
    p.add_argument("--script", help="command script file (tick -> command)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="run paced with the live gateway")
    p.add_argument("scenario")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--static", help="serve this directory as the console UI")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="verify a log reproduces exactly")
    p.add_argument("log")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("export", help="export position-response curves")
    p.add_argument("log")
    p.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SwarmSimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
