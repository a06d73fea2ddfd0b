"""Live command gateway: WebSocket state stream + swarm command endpoint.

Wire protocol (one JSON object per WebSocket text message, newline
terminated; documented in docs/wire_protocol.md):

    server -> client:  {"kind": "hello", ...}       once, on connect
                       {"kind": "state_snapshot", ...}  every Nth tick
                       {"kind": "ack", "id": ...}       command accepted
                       {"kind": "error", "id": ..., "message": ...}
    client -> server:  {"kind": "command", "id": ..., "command": {...}}

The engine runs on its own thread; snapshots cross to connection handlers
through a version-counted hub and commands go the other way through the
engine's thread-safe intake queue.
"""

from __future__ import annotations

import asyncio
import json
import logging
import socket
import threading
from dataclasses import dataclass

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .engine import Engine, RunContext, SwarmCommand, max_formation_error
from .errors import SwarmSimError
from .scenario import ScenarioConfig, build_context

log = logging.getLogger(__name__)

STREAM_DECIMATION = 5  # every Nth tick at dt=0.02 -> 10 Hz


class SnapshotHub:
    """Latest-value handoff from the engine thread to any number of readers."""

    def __init__(self):
        self._lock = threading.Lock()
        self._latest: dict | None = None
        self._version = 0

    def publish(self, snapshot: dict) -> None:
        with self._lock:
            self._latest = snapshot
            self._version += 1

    def read(self) -> tuple[int, dict | None]:
        with self._lock:
            return self._version, self._latest


def snapshot_message(engine: Engine, world) -> dict:
    ctx = engine.ctx
    err = max_formation_error(world)
    mission = None
    if ctx.mission is not None:
        mission = {
            "complete": world.mission_complete,
            "detection": world.detection,
            "waypoint_index": list(world.wp_index),
        }
    return {
        "kind": "state_snapshot",
        "tick": world.tick,
        "sim_time": world.tick * ctx.dt,
        "paused": engine.paused,
        "speed_factor": engine.speed_factor,
        "formation": world.formation,
        "formations": sorted(ctx.formations),
        "max_error": err,
        "leader": ctx.leader.leader_index,
        "positions": [[float(v) for v in p] for p in world.positions],
        "velocities": [[float(v) for v in p] for p in world.velocities],
        "mission": mission,
    }


def parse_command(doc: dict) -> SwarmCommand:
    """Validate one wire command document; raises SwarmSimError on junk."""
    if not isinstance(doc, dict) or doc.get("kind") != "command":
        raise SwarmSimError("expected a message with kind 'command'")
    body = doc.get("command")
    if not isinstance(body, dict):
        raise SwarmSimError("missing command body")
    try:
        cmd = SwarmCommand.from_payload({**body, "source": "gateway"})
    except (KeyError, TypeError, ValueError) as e:
        raise SwarmSimError(f"bad command: {e}") from e
    return cmd


def create_app(engine: Engine, hub: SnapshotHub, static_dir=None) -> FastAPI:
    app = FastAPI(title="swarmsim gateway")

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "tick": engine.world.tick}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        ctx = engine.ctx
        await ws.send_text(json.dumps({
            "kind": "hello",
            "protocol": 1,
            "scenario": ctx.scenario["name"],
            "agents": ctx.n,
            "dt": ctx.dt,
            "formations": sorted(ctx.formations),
            "leader": ctx.leader.leader_index,
        }) + "\n")

        async def stream():
            seen = -1
            while True:
                version, snap = hub.read()
                if snap is not None and version != seen:
                    seen = version
                    await ws.send_text(json.dumps(snap) + "\n")
                await asyncio.sleep(0.005)

        async def commands():
            while True:
                raw = await ws.receive_text()
                try:
                    doc = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(
                        {"kind": "error", "id": None, "message": "not valid JSON"}) + "\n")
                    continue
                msg_id = doc.get("id") if isinstance(doc, dict) else None
                try:
                    cmd = parse_command(doc)
                except SwarmSimError as e:
                    await ws.send_text(json.dumps(
                        {"kind": "error", "id": msg_id, "message": str(e)}) + "\n")
                    continue
                if cmd.kind == "set_formation" and cmd.name not in engine.ctx.formations:
                    await ws.send_text(json.dumps(
                        {"kind": "error", "id": msg_id,
                         "message": f"unknown formation {cmd.name!r}"}) + "\n")
                    continue
                engine.submit(cmd, at_tick=doc.get("at_tick"))
                await ws.send_text(json.dumps({"kind": "ack", "id": msg_id}) + "\n")

        stream_task = asyncio.create_task(stream())
        try:
            await commands()
        except WebSocketDisconnect:
            pass
        finally:
            stream_task.cancel()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")
    return app


@dataclass
class GatewayHandle:
    engine: Engine
    hub: SnapshotHub
    thread: threading.Thread


def start_engine_thread(ctx: RunContext, hub: SnapshotHub,
                        decimation: int = STREAM_DECIMATION) -> GatewayHandle:
    """Run the engine paced on a daemon thread, feeding the hub."""
    engine = Engine(ctx)
    if engine.speed_factor == 0.0:
        engine.speed_factor = 1.0  # live operation defaults to real time

    last_pushed = {"tick": -1, "paused": engine.paused, "speed": engine.speed_factor}

    def on_tick(world, _events):
        changed = (
            world.tick % decimation == 0
            or engine.paused != last_pushed["paused"]
            or engine.speed_factor != last_pushed["speed"]
        )
        if changed:
            last_pushed.update(tick=world.tick, paused=engine.paused,
                               speed=engine.speed_factor)
            hub.publish(snapshot_message(engine, world))

    def body():
        try:
            engine.run(on_tick=on_tick)
        except SwarmSimError as e:
            log.error("engine stopped: %s", e)
        hub.publish(snapshot_message(engine, engine.world))

    thread = threading.Thread(target=body, name="swarmsim-engine", daemon=True)
    thread.start()
    return GatewayHandle(engine=engine, hub=hub, thread=thread)


def check_port_free(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as e:
        raise SwarmSimError(f"port {port} unavailable: {e}") from e
    finally:
        probe.close()


def serve(config: ScenarioConfig, port: int, host: str = "127.0.0.1",
          static_dir=None) -> None:
    """Start the paced run and serve the gateway until interrupted."""
    import uvicorn

    check_port_free(host, port)
    ctx = build_context(config)
    hub = SnapshotHub()
    handle = start_engine_thread(ctx, hub)
    app = create_app(handle.engine, hub, static_dir=static_dir)
    log.info("gateway on ws://%s:%d/ws (scenario %s)", host, port, config.name)
    uvicorn.run(app, host=host, port=port, log_level="warning")
