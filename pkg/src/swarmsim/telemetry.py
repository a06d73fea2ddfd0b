"""Structured, replayable telemetry log.

File layout (version 1): an 8-byte magic string, then a length-prefixed
JSON header, then one length-prefixed record per event.  All JSON is
canonical (sorted keys, compact separators), so identical runs serialize
to identical bytes and byte comparison doubles as a determinism check.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

from .errors import ReplayRefused, SwarmSimError
from .events import SimEvent

MAGIC = b"SSIMLOG1"
FORMAT_VERSION = 1
SCENARIO_SCHEMA_ID = "swarmsim/scenario/v1"


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def scenario_hash(scenario: dict) -> str:
    return hashlib.sha256(canonical_json(scenario)).hexdigest()


@dataclass
class TelemetryLog:
    header: dict
    events: list[SimEvent] = field(default_factory=list)

    @classmethod
    def for_scenario(cls, scenario: dict) -> "TelemetryLog":
        header = {
            "version": FORMAT_VERSION,
            "dt": scenario["dt"],
            "seed": scenario["seed"],
            "scenario": scenario,
            "scenario_schema": SCENARIO_SCHEMA_ID,
            "scenario_hash": scenario_hash(scenario),
        }
        return cls(header=header)

    def record(self, event: SimEvent) -> SimEvent:
        """Append one event; ticks must be non-decreasing."""
        if self.events and event.tick < self.events[-1].tick:
            raise SwarmSimError(
                f"out-of-order event: tick {event.tick} after tick {self.events[-1].tick}"
            )
        stamped = SimEvent(tick=event.tick, kind=event.kind, payload=event.payload,
                           seq=len(self.events))
        self.events.append(stamped)
        return stamped

    def by_kind(self, kind: str) -> list[SimEvent]:
        return [e for e in self.events if e.kind == kind]

    def to_bytes(self) -> bytes:
        chunks = [MAGIC]
        head = canonical_json(self.header)
        chunks.append(struct.pack(">I", len(head)))
        chunks.append(head)
        for ev in self.events:
            body = canonical_json({"tick": ev.tick, "kind": ev.kind, "seq": ev.seq,
                                   "payload": ev.payload})
            chunks.append(struct.pack(">I", len(body)))
            chunks.append(body)
        return b"".join(chunks)

    @classmethod
    def from_bytes(cls, data: bytes) -> "TelemetryLog":
        if data[: len(MAGIC)] != MAGIC:
            raise SwarmSimError("not a telemetry log (bad magic)")
        off = len(MAGIC)
        (length,) = struct.unpack_from(">I", data, off)
        header = json.loads(data[off + 4 : off + 4 + length])
        if header.get("version") != FORMAT_VERSION:
            raise SwarmSimError(f"unsupported log version {header.get('version')}")
        off = off + 4 + length
        log = cls(header=header)
        while off < len(data):
            (length,) = struct.unpack_from(">I", data, off)
            body = json.loads(data[off + 4 : off + 4 + length])
            log.events.append(
                SimEvent(tick=body["tick"], kind=body["kind"], payload=body["payload"],
                         seq=body["seq"])
            )
            off = off + 4 + length
        return log

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def read(cls, path) -> "TelemetryLog":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


@dataclass(frozen=True)
class ReplayReport:
    ticks_compared: int
    divergence: str | None

    @property
    def ok(self) -> bool:
        return self.divergence is None


def replay(log: TelemetryLog) -> ReplayReport:
    """Re-execute the scenario in the log header and compare snapshots.

    Commands recorded in the log are re-injected at their original ticks,
    so scripted and gateway-driven runs replay alike.  Refuses logs whose
    embedded scenario no longer matches its hash.
    """
    from .engine import Engine  # local import: engine depends on this module
    from .scenario import ScenarioConfig, build_context

    scenario = log.header["scenario"]
    if scenario_hash(scenario) != log.header["scenario_hash"]:
        raise ReplayRefused("scenario hash mismatch: log header was modified")
    snapshots = log.by_kind("snapshot")
    if not snapshots:
        return ReplayReport(ticks_compared=0, divergence=None)

    script: dict[int, list[dict]] = {}
    for ev in log.by_kind("command"):
        script.setdefault(ev.tick, []).append(ev.payload)

    ctx = build_context(ScenarioConfig(doc=scenario, path=None, warnings=[]))
    engine = Engine(ctx)
    last_tick = snapshots[-1].tick
    expected = {ev.tick: ev for ev in snapshots}
    compared = 0
    while engine.world.tick < last_tick:
        from .engine import SwarmCommand

        due = [SwarmCommand.from_payload(p) for p in script.get(engine.world.tick + 1, [])]
        engine.step_once(due)
        got = [e for e in engine.drain_events() if e.kind == "snapshot"]
        for ev in got:
            want = expected.get(ev.tick)
            if want is None:
                continue
            compared += 1
            if want.payload != ev.payload:
                field_name = _first_difference(want.payload, ev.payload)
                return ReplayReport(
                    ticks_compared=compared,
                    divergence=f"tick {ev.tick}: snapshot differs at {field_name}",
                )
    return ReplayReport(ticks_compared=compared, divergence=None)


def _first_difference(a: dict, b: dict) -> str:
    for key in sorted(set(a) | set(b)):
        if a.get(key) != b.get(key):
            return key
    return "<unknown>"


def export_curves(log: TelemetryLog, axis: str) -> str:
    """Position-response table: one row per snapshot tick, one column per
    agent, tab-separated, '#'-prefixed header (numpy/gnuplot friendly)."""
    axes = {"x": 0, "y": 1, "z": 2}
    if axis not in axes:
        raise ValueError("axis must be one of x, y, z")
    col = axes[axis]
    snapshots = log.by_kind("snapshot")
    lines = []
    n = len(snapshots[0].payload["positions"]) if snapshots else 0
    lines.append("# tick\t" + "\t".join(f"uav{i + 1}" for i in range(n)))
    for ev in snapshots:
        vals = [repr(p[col]) for p in ev.payload["positions"]]
        lines.append(str(ev.tick) + "\t" + "\t".join(vals))
    return "\n".join(lines) + "\n"
