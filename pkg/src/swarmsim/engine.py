"""Lockstep discrete-time engine.

Every tick runs the same phase sequence for all agents:

    CommandIntake -> BusDelivery -> Coordination -> HighLevelControl
    -> LowLevelControl -> Integrate -> Telemetry

Controllers read the tick-t snapshot and write tick-t+1 intents, so agent
iteration order cannot leak state within a tick.  Simulated time is the
integer tick times dt; wall-clock pacing lives entirely in the run loop
and never touches world state, which is what makes trajectories invariant
under the speed factor.
"""

from __future__ import annotations

import logging
import math
import queue
import threading
import time
from dataclasses import dataclass

import numpy as np

from . import bus
from .assignment import reconfigure
from .avoidance import AvoidanceConfig, avoidance_vector
from .dynamics import AgentState, saturate
from .errors import SimulationHalt
from .events import SimEvent
from .formation import FormationSpec, consensus_velocity
from .search import SearchPlan, SearchRegion, detect, track_waypoints
from .telemetry import TelemetryLog
from .topology import LeaderDesignation, TopologyMatrix

log = logging.getLogger(__name__)

FREE_RUN = 0.0  # speed_factor sentinel: never sleep between ticks

# every tick executes these phases in this exact order for all agents
PHASES = ("CommandIntake", "BusDelivery", "Coordination", "HighLevelControl",
          "LowLevelControl", "Integrate", "Telemetry")

COMMAND_KINDS = ("set_formation", "leader_velocity", "pause", "resume", "set_speed", "stop")


@dataclass(frozen=True)
class SimClock:
    """Simulation clock: time is the integer tick times dt, so there is no
    accumulated floating drift; the speed factor only paces the wall clock."""

    tick: int
    dt: float
    speed_factor: float

    def __post_init__(self):
        if self.tick < 0:
            raise ValueError("tick must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not math.isfinite(self.speed_factor) or self.speed_factor < 0:
            raise ValueError("speed_factor must be positive (or 0 for free-run)")

    @property
    def sim_time(self) -> float:
        return self.tick * self.dt


@dataclass(frozen=True)
class SwarmCommand:
    kind: str
    name: str | None = None
    velocity: tuple[float, float, float] | None = None
    factor: float | None = None
    source: str = "script"

    def __post_init__(self):
        if self.kind not in COMMAND_KINDS:
            raise ValueError(f"unknown command kind {self.kind!r}")
        if self.kind == "set_formation" and not self.name:
            raise ValueError("set_formation requires a formation name")
        if self.kind == "leader_velocity":
            if self.velocity is None or len(self.velocity) != 3:
                raise ValueError("leader_velocity requires a 3-vector")
            if not all(math.isfinite(v) for v in self.velocity):
                raise ValueError("leader_velocity components must be finite")
        if self.kind == "set_speed":
            if self.factor is None or not math.isfinite(self.factor) or self.factor < 0:
                raise ValueError("set_speed requires a factor > 0 (or 0 for free-run)")

    def to_payload(self) -> dict:
        # no source tag: scripted and gateway-driven runs must log
        # byte-identically
        out: dict = {"kind": self.kind}
        if self.name is not None:
            out["name"] = self.name
        if self.velocity is not None:
            out["velocity"] = [float(v) for v in self.velocity]
        if self.factor is not None:
            out["factor"] = float(self.factor)
        return out

    @classmethod
    def from_payload(cls, payload: dict) -> "SwarmCommand":
        return cls(
            kind=payload["kind"],
            name=payload.get("name"),
            velocity=tuple(payload["velocity"]) if "velocity" in payload else None,
            factor=payload.get("factor"),
            source=payload.get("source", "script"),
        )


@dataclass(frozen=True)
class MissionContext:
    region: SearchRegion
    plan: SearchPlan
    target: np.ndarray  # (3,)
    p_detect: float
    footprint_radius: float
    accept_radius: float


@dataclass(frozen=True)
class RunContext:
    """Static per-run configuration; world state holds everything mutable."""

    n: int
    dt: float
    seed: int
    topology: TopologyMatrix
    leader: LeaderDesignation
    v_max: float
    gain: float
    formations: dict[str, FormationSpec]
    avoidance: AvoidanceConfig | None
    mission: MissionContext | None
    d_min: float
    snapshot_every: int
    scenario: dict
    initial_positions: np.ndarray | None  # None = spawn from seed
    spawn: dict | None
    initial_formation: str | None
    stop: dict
    speed_factor: float

    @property
    def proximity_threshold(self) -> float | None:
        return 0.5 * self.avoidance.b if self.avoidance is not None else None


@dataclass(frozen=True)
class WorldState:
    """Immutable snapshot at one tick; values may be shared across threads."""

    tick: int
    positions: np.ndarray  # (n, 3)
    velocities: np.ndarray  # (n, 3)
    deltas: np.ndarray  # (n, 3) currently assigned formation offsets
    formation: str | None
    leader_cmd: np.ndarray  # (3,) station-commanded leader velocity
    in_flight: tuple[bus.TopicMessage, ...]
    next_seq: int
    wp_index: tuple[int, ...]
    detection: dict | None
    rng_state: dict

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def mission_complete(self) -> bool:
        return self.detection is not None

    def agent_states(self) -> list[AgentState]:
        return [AgentState(i, self.positions[i], self.velocities[i]) for i in range(self.n)]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.flags.writeable = False
    return a


def _vec3(x) -> list[float]:
    return [float(x[0]), float(x[1]), float(x[2])]


def sim_time(world: WorldState, ctx: RunContext) -> float:
    return world.tick * ctx.dt


def build_initial_world(ctx: RunContext) -> tuple[WorldState, list[SimEvent]]:
    """Tick-0 snapshot: spawn positions, initial offsets, first state reports."""
    rng = np.random.default_rng(ctx.seed)
    n = ctx.n
    if ctx.initial_positions is not None:
        positions = np.array(ctx.initial_positions, dtype=float)
    elif ctx.spawn is not None and n > 0:
        kind = ctx.spawn["kind"]
        if kind == "random_cube":
            span = float(ctx.spawn["span"])
            positions = rng.random((n, 3)) * span
        elif kind == "grid":
            spacing = float(ctx.spawn["spacing"])
            alt = float(ctx.spawn.get("altitude", 5.0))
            side = math.ceil(math.sqrt(n))
            pts = []
            for i in range(n):
                gx, gy = i % side, i // side
                pts.append(((gx - (side - 1) / 2) * spacing, (gy - (side - 1) / 2) * spacing, alt))
            positions = np.array(pts)
        else:
            raise ValueError(f"unknown spawn kind {kind!r}")
    else:
        positions = np.zeros((n, 3))

    if ctx.initial_formation is not None:
        spec = ctx.formations[ctx.initial_formation]
        deltas = np.array(spec.offsets, dtype=float)
        formation = ctx.initial_formation
    else:
        deltas = np.zeros((n, 3))
        formation = None

    events: list[SimEvent] = []
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.linalg.norm(positions[i] - positions[j]))
            if d < ctx.d_min:
                events.append(SimEvent(0, "violation", {
                    "kind": "spawn_proximity", "severity": "warning",
                    "agents": [i, j], "distance": d,
                }))

    reports = tuple(
        bus.TopicMessage(bus.state_topic(i), i, 0, i,
                         {"position": _vec3(positions[i]), "velocity": [0.0, 0.0, 0.0]})
        for i in range(n)
    )
    world = WorldState(
        tick=0,
        positions=_frozen(positions),
        velocities=_frozen(np.zeros((n, 3))),
        deltas=_frozen(deltas),
        formation=formation,
        leader_cmd=_frozen(np.zeros(3)),
        in_flight=reports,
        next_seq=n,
        wp_index=tuple([0] * n),
        detection=None,
        rng_state=rng.bit_generator.state,
    )
    events.append(_snapshot_event(world, ctx))
    return world, events


def max_formation_error(world: WorldState) -> float:
    """Max all-pairs offset-compensated position error at this tick."""
    if world.n == 0:
        return 0.0
    y = world.positions - world.deltas
    diffs = y[:, None, :] - y[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs)).max())


def _snapshot_event(world: WorldState, ctx: RunContext) -> SimEvent:
    return SimEvent(world.tick, "snapshot", {
        "positions": [_vec3(p) for p in world.positions],
        "velocities": [_vec3(v) for v in world.velocities],
        "formation": world.formation,
        "max_error": max_formation_error(world),
    })


def step(world: WorldState, ctx: RunContext,
         commands: tuple[SwarmCommand, ...] = ()) -> tuple[WorldState, list[SimEvent]]:
    """Advance one tick.  Pure given (world, ctx, commands): identical
    inputs produce bit-identical successor worlds and events."""
    t = world.tick + 1
    n = world.n
    lead = ctx.leader.leader_index
    events: list[SimEvent] = []
    violations: list[SimEvent] = []
    outbox: list[bus.TopicMessage] = []
    seq = world.next_seq

    if n > 0 and not np.all(np.isfinite(world.positions)):
        agent = int(np.nonzero(~np.isfinite(world.positions).all(axis=1))[0][0])
        raise SimulationHalt(agent=agent, phase="CommandIntake", detail="NaN position in snapshot")

    def publish(topic: str, sender, payload: dict) -> None:
        nonlocal seq
        bus.publish(outbox, bus.TopicMessage(topic, sender, t, seq, payload), n)
        seq += 1

    # --- CommandIntake: drain station commands at the tick boundary ---
    for cmd in commands:
        events.append(SimEvent(t, "command", cmd.to_payload()))
        if cmd.kind == "set_formation":
            if cmd.name not in ctx.formations:
                violations.append(SimEvent(t, "violation", {
                    "kind": "command_rejected", "severity": "error",
                    "detail": f"unknown formation {cmd.name!r}",
                }))
            else:
                publish(bus.FORMATION_CMD_TOPIC, bus.GCS, {"formation": cmd.name})
        elif cmd.kind == "leader_velocity":
            publish(bus.cmd_vel_topic(lead), bus.GCS, {"velocity": list(cmd.velocity)})
        # pause/resume/set_speed/stop are pacing controls handled by the
        # run loop; they are recorded here but never alter world state.

    # --- BusDelivery: hand out everything published last tick ---
    # state reports feed the consensus controller; the mission controller
    # tracks waypoints instead, so conversion is skipped there
    want_reports = ctx.mission is None
    neighbor_reports: dict[int, list[tuple[int, np.ndarray]]] = {i: [] for i in range(n)}
    new_deltas = world.deltas
    new_formation = world.formation
    new_leader_cmd = world.leader_cmd
    formation_request: str | None = None
    assignment_adopted = False
    for msg, receiver in bus.route(world.in_flight, ctx.topology, lead):
        events.append(SimEvent(t, "delivery", {
            "topic": msg.topic, "sender": msg.sender, "receiver": receiver,
            "tick_sent": msg.tick_sent, "seq": msg.seq,
        }))
        if msg.topic == bus.FORMATION_CMD_TOPIC:
            formation_request = msg.payload["formation"]
        elif msg.topic == bus.ASSIGNMENT_TOPIC:
            if receiver == bus.GCS:
                publish(bus.ASSIGNMENT_TOPIC, bus.GCS, msg.payload)  # station relay
            elif not assignment_adopted:
                # broadcast reaches every agent this same tick; adopt once
                table = np.zeros((n, 3))
                for agent, _slot, delta in msg.payload["entries"]:
                    table[agent] = delta
                table[lead] = 0.0
                new_deltas = _frozen(table)
                new_formation = msg.payload["formation"]
                assignment_adopted = True
        elif receiver == lead and msg.topic == bus.cmd_vel_topic(lead):
            new_leader_cmd = _frozen(np.array(msg.payload["velocity"], dtype=float))
        elif want_reports and isinstance(receiver, int) and isinstance(msg.sender, int):
            neighbor_reports[receiver].append(
                (msg.sender, np.array(msg.payload["position"], dtype=float))
            )

    # --- Coordination: leader solves the assignment on a formation switch ---
    if formation_request is not None:
        target = ctx.formations.get(formation_request)
        if target is None or target.n != n:
            violations.append(SimEvent(t, "violation", {
                "kind": "command_rejected", "severity": "error",
                "detail": f"formation {formation_request!r} does not fit {n} agents",
            }))
        else:
            current = ctx.formations.get(world.formation) if world.formation else None
            mapping = reconfigure(current, target, world.agent_states(), ctx.leader)
            events.append(SimEvent(t, "assignment", {
                "formation": mapping.formation,
                "entries": [[a, s, list(d)] for a, s, d in mapping.entries],
                "total_cost": mapping.total_cost,
            }))
            publish(bus.ASSIGNMENT_TOPIC, lead, {
                "formation": mapping.formation,
                "entries": [[a, s, list(d)] for a, s, d in mapping.entries],
            })

    # --- HighLevelControl: per-agent velocity intent from tick-t data ---
    new_rng_state = world.rng_state
    u_desired = np.zeros((n, 3))
    new_wp = list(world.wp_index)
    new_detection = world.detection
    coincident: list[tuple[int, int]] = []
    if n > 0:
        sep = world.positions[None, :, :] - world.positions[:, None, :]  # sep[i][j]: i -> j
        dist = np.linalg.norm(sep, axis=2)

    assigned = FormationSpec("assigned", new_deltas) if n > 0 else None
    for i in range(n):
        state_i = AgentState(i, world.positions[i], world.velocities[i])
        if ctx.mission is not None:
            cmd_i, new_wp[i] = track_waypoints(
                state_i, ctx.mission.plan.waypoints[i], ctx.mission.accept_radius,
                ctx.v_max, world.wp_index[i])
            u_cons = cmd_i.u_desired
        elif i == lead:
            u_cons = new_leader_cmd
        else:
            expected = set(ctx.topology.in_neighbors(i))
            got = {j for j, _ in neighbor_reports[i]}
            if expected - got:
                log.debug("tick %d: agent %d missing reports from %s", t, i, sorted(expected - got))
            u_cons = consensus_velocity(i, state_i, neighbor_reports[i], ctx.topology,
                                        assigned, ctx.gain)
        if ctx.avoidance is not None and ctx.avoidance.enabled:
            in_range = [
                (j, sep[i, j]) for j in range(n)
                if j != i and dist[i, j] <= ctx.avoidance.b
            ]
            av = avoidance_vector(in_range, ctx.avoidance)
            for j in av.skipped:
                coincident.append((min(i, j), max(i, j)))
            u_desired[i] = u_cons + av.a
        else:
            u_desired[i] = u_cons

    if ctx.mission is not None and new_detection is None:
        tx, ty = float(ctx.mission.target[0]), float(ctx.mission.target[1])
        radius = ctx.mission.footprint_radius
        in_footprint = [
            i for i in range(n)
            if math.hypot(float(world.positions[i, 0]) - tx,
                          float(world.positions[i, 1]) - ty) <= radius
        ]
        if in_footprint:
            # the seeded stream is consumed only by in-footprint agents, in
            # agent order, so detection ticks replay exactly
            rng = np.random.Generator(np.random.PCG64(0))
            rng.bit_generator.state = world.rng_state
            for i in in_footprint:
                state_i = AgentState(i, world.positions[i], world.velocities[i])
                report = detect(state_i, ctx.mission.target, radius,
                                ctx.mission.p_detect, rng, tick=t)
                if report is not None:
                    new_detection = {"tick": t, "agent": i,
                                     "target_est": list(report.target_estimate)}
                    events.append(SimEvent(t, "detection", dict(new_detection)))
                    publish(bus.DETECTION_TOPIC, i, dict(new_detection))
                    break
            new_rng_state = rng.bit_generator.state

    # --- LowLevelControl: saturation (the velocity-tracking stand-in) ---
    for i in range(n):
        if not np.all(np.isfinite(u_desired[i])):
            raise SimulationHalt(agent=i, phase="LowLevelControl",
                                 detail="non-finite velocity command")
        u_desired[i] = saturate(u_desired[i], ctx.v_max)

    # --- Integrate: forward Euler (vectorized form of dynamics.integrate) ---
    new_positions = world.positions + u_desired * ctx.dt

    # --- Telemetry: violations, state reports, snapshot ---
    for i, j in sorted(set(coincident)):
        violations.append(SimEvent(t, "violation", {
            "kind": "coincident", "severity": "error", "agents": [i, j],
        }))
    thr = ctx.proximity_threshold
    if thr is not None and n > 1:
        new_dist = np.linalg.norm(new_positions[None, :, :] - new_positions[:, None, :], axis=2)
        for i in range(n):
            for j in range(i + 1, n):
                if new_dist[i, j] < thr <= dist[i, j]:
                    violations.append(SimEvent(t, "violation", {
                        "kind": "proximity", "severity": "error",
                        "agents": [i, j], "distance": float(new_dist[i, j]),
                        "threshold": thr,
                    }))
    events.extend(violations)

    for i in range(n):
        publish(bus.state_topic(i), i,
                {"position": _vec3(new_positions[i]), "velocity": _vec3(u_desired[i])})

    new_world = WorldState(
        tick=t,
        positions=_frozen(new_positions),
        velocities=_frozen(u_desired),
        deltas=new_deltas,
        formation=new_formation,
        leader_cmd=new_leader_cmd,
        in_flight=tuple(outbox),
        next_seq=seq,
        wp_index=tuple(new_wp),
        detection=new_detection,
        rng_state=new_rng_state,
    )
    if t % ctx.snapshot_every == 0:
        events.append(_snapshot_event(new_world, ctx))
    return new_world, events


class Engine:
    """Owns the world, the telemetry log and the external command queue.

    The step loop is single-threaded; other threads interact only through
    ``submit`` (thread-safe queue, drained at tick boundaries) and the
    immutable world snapshots handed to ``on_tick``.
    """

    def __init__(self, ctx: RunContext, log_sink: TelemetryLog | None = None):
        self.ctx = ctx
        self.telemetry = log_sink if log_sink is not None else TelemetryLog.for_scenario(ctx.scenario)
        self.world, initial_events = build_initial_world(ctx)
        self._pending_events: list[SimEvent] = []
        for ev in initial_events:
            self._record(ev)
        self._queue: "queue.Queue[tuple[int | None, SwarmCommand]]" = queue.Queue()
        self._held: list[tuple[int, SwarmCommand]] = []
        self.speed_factor = ctx.speed_factor
        self.paused = False
        self._stop_requested = False
        self._lock = threading.Lock()

    # -- command intake ------------------------------------------------

    @property
    def clock(self) -> SimClock:
        return SimClock(tick=self.world.tick, dt=self.ctx.dt, speed_factor=self.speed_factor)

    def submit(self, cmd: SwarmCommand, at_tick: int | None = None) -> None:
        """Queue a command for the next (or a specific) tick boundary."""
        self._queue.put((at_tick, cmd))

    def set_speed_factor(self, factor: float) -> bool:
        """Change pacing at the next boundary; trajectories are unaffected."""
        if not math.isfinite(factor) or factor < 0:
            raise ValueError("speed factor must be positive (or 0 for free-run)")
        self.submit(SwarmCommand(kind="set_speed", factor=factor, source="api"))
        return True

    def _drain_queue(self, default_tick: int) -> None:
        while True:
            try:
                at_tick, cmd = self._queue.get_nowait()
            except queue.Empty:
                break
            self._held.append((at_tick if at_tick is not None else default_tick, cmd))

    def _take_due(self, next_tick: int) -> list[SwarmCommand]:
        due = [c for tk, c in self._held if tk <= next_tick]
        self._held = [(tk, c) for tk, c in self._held if tk > next_tick]
        return due

    # -- stepping ------------------------------------------------------

    def _record(self, ev: SimEvent) -> None:
        stamped = self.telemetry.record(ev)
        self._pending_events.append(stamped)

    def drain_events(self) -> list[SimEvent]:
        out = self._pending_events
        self._pending_events = []
        return out

    def step_once(self, commands: tuple[SwarmCommand, ...] | list[SwarmCommand] = ()) -> WorldState:
        """One tick with the given boundary commands; applies pacing-control
        side effects (pause/speed/stop flags) after recording them."""
        world, events = step(self.world, self.ctx, tuple(commands))
        for ev in events:
            self._record(ev)
        for cmd in commands:
            if cmd.kind == "pause":
                self.paused = True
            elif cmd.kind == "resume":
                self.paused = False
            elif cmd.kind == "set_speed":
                self.speed_factor = float(cmd.factor)
            elif cmd.kind == "stop":
                self._stop_requested = True
        self.world = world
        return world

    # -- stop conditions -----------------------------------------------

    def _stopped(self) -> bool:
        stop = self.ctx.stop
        if self._stop_requested:
            return True
        if "ticks" in stop and self.world.tick >= stop["ticks"]:
            return True
        if "sim_time" in stop and self.world.tick * self.ctx.dt >= stop["sim_time"]:
            return True
        if stop.get("mission_complete") and self.world.mission_complete:
            return True
        return False

    # -- run loop --------------------------------------------------------

    def run(self, on_tick=None) -> TelemetryLog:
        """Run to the scenario stop condition, honoring speed-factor pacing.

        While paused, ticks do not advance; a queued resume (or stop)
        unblocks the next boundary and any commands waiting for it apply
        there.  ``on_tick(world, events)`` fires after every tick.
        Pacing sleeps are best-effort and never influence the log.
        """
        self._emit(on_tick)
        wall_start = time.monotonic()
        tick_base = self.world.tick
        speed = self.speed_factor
        while not self._stopped():
            next_tick = self.world.tick + 1
            self._drain_queue(next_tick)
            if self.paused:
                due = [c.kind for tk, c in self._held if tk <= next_tick]
                if not any(k in ("resume", "stop") for k in due):
                    time.sleep(0.002)
                    continue
            commands = self._take_due(next_tick)
            world = self.step_once(commands)
            self._emit(on_tick)
            if self.speed_factor != speed or any(
                c.kind in ("pause", "resume", "set_speed") for c in commands
            ):
                speed = self.speed_factor
                wall_start = time.monotonic()
                tick_base = world.tick
            if speed != FREE_RUN and not self.paused:
                target = wall_start + (world.tick - tick_base) * self.ctx.dt / speed
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
        return self.telemetry

    def _emit(self, on_tick) -> None:
        events = self.drain_events()
        if on_tick is not None:
            on_tick(self.world, events)


def run_scenario(ctx: RunContext, script: dict[int, list[SwarmCommand]] | None = None,
                 on_tick=None) -> TelemetryLog:
    """Headless run: scripted commands are injected at their exact ticks."""
    engine = Engine(ctx)
    if script:
        for tick, cmds in script.items():
            for cmd in cmds:
                engine.submit(cmd, at_tick=tick)
    return engine.run(on_tick=on_tick)
