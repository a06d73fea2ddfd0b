/** Live integration against the real Python gateway.
 *
 * Spawns `swarmsim serve nine_uav_console` and drives it through the same
 * client/controls stack the browser uses: formation buttons must drive
 * convergence visible in the stream, and a held steering key must move
 * the leader at 1 m/s (within 5%) while the formation error stays small.
 */

import { spawn, ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { GatewayClient, Transport } from "../src/client.js";
import { Controls } from "../src/controls.js";
import { StateSnapshotMsg } from "../src/protocol.js";

const PYTHON = process.env.SWARMSIM_PYTHON ?? "python3";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const port = (srv.address() as { port: number }).port;
      srv.close(() => resolve(port));
    });
    srv.on("error", reject);
  });
}

function wsTransport(ws: WebSocket): Transport {
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onMessage: (handler) => ws.on("message", (data) => handler(data.toString())),
    onClose: (handler) => ws.on("close", handler),
  };
}

interface Waiter {
  predicate: (s: StateSnapshotMsg) => boolean;
  resolve: (s: StateSnapshotMsg) => void;
}

let proc: ChildProcess;
let client: GatewayClient;
let controls: Controls;
const waiters: Waiter[] = [];
const listeners: Array<(s: StateSnapshotMsg) => void> = [];

function handleSnapshot(snap: StateSnapshotMsg): void {
  for (const fn of listeners) fn(snap);
  for (let i = waiters.length - 1; i >= 0; i--) {
    if (waiters[i].predicate(snap)) {
      const [w] = waiters.splice(i, 1);
      w.resolve(snap);
    }
  }
}

function nextSnapshot(predicate: (s: StateSnapshotMsg) => boolean, timeoutMs = 60000):
    Promise<StateSnapshotMsg> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("timed out waiting for snapshot")),
                             timeoutMs);
    waiters.push({
      predicate,
      resolve: (s) => {
        clearTimeout(timer);
        resolve(s);
      },
    });
  });
}

beforeAll(async () => {
  const port = await freePort();
  proc = spawn(PYTHON, ["-m", "swarmsim.cli", "serve", "nine_uav_console",
                        "--port", String(port)],
               { cwd: "..", stdio: ["ignore", "pipe", "pipe"] });
  proc.stderr?.on("data", () => {});

  // wait for the port to accept a websocket
  let ws: WebSocket | null = null;
  for (let attempt = 0; attempt < 50 && ws === null; attempt++) {
    await new Promise((r) => setTimeout(r, 200));
    ws = await new Promise<WebSocket | null>((resolve) => {
      const candidate = new WebSocket(`ws://127.0.0.1:${port}/ws`);
      candidate.once("open", () => resolve(candidate));
      candidate.once("error", () => resolve(null));
    });
  }
  if (ws === null) throw new Error("gateway never came up");
  client = new GatewayClient(wsTransport(ws));
  controls = new Controls(client);
  client.onSnapshot = handleSnapshot;
  // run fast so 10 simulated seconds take a fraction of wall time
  controls.setSpeed(8);
  await nextSnapshot((s) => s.speed_factor === 8);
}, 30000);

afterAll(() => {
  client?.close();
  proc?.kill();
});

describe("live gateway drive", () => {
  it("each formation button drives convergence visible in the stream", async () => {
    for (const name of ["pyramid", "triangle", "cube"]) {
      controls.setFormation(name);
      const settled = await nextSnapshot(
        (s) => s.formation === name && s.max_error < 0.05,
      );
      expect(settled.formation).toBe(name);
      expect(settled.max_error).toBeLessThan(0.05);
    }
  }, 120000);

  it("holding a steering key moves the leader at 1 m/s within 5%", async () => {
    controls.keyDown("d"); // +x at 1 m/s
    // skip the spin-up, then measure over >= 10 simulated seconds
    const start = await nextSnapshot((s) => s.velocities[0][0] > 0.5);
    const first = await nextSnapshot((s) => s.sim_time >= start.sim_time + 2.0);
    const errors: number[] = [];
    const track = (s: StateSnapshotMsg) => errors.push(s.max_error);
    listeners.push(track);
    const last = await nextSnapshot((s) => s.sim_time >= first.sim_time + 10.0);
    listeners.splice(listeners.indexOf(track), 1);
    controls.keyUp("d");

    const speed = (last.positions[0][0] - first.positions[0][0]) /
                  (last.sim_time - first.sim_time);
    expect(Math.abs(speed - 1.0)).toBeLessThan(0.05);
    expect(Math.max(...errors)).toBeLessThan(0.2);
    await nextSnapshot((s) => s.velocities[0][0] === 0);
  }, 120000);

  it("command history reflects gateway acks", async () => {
    const entry = controls ? client.send({ kind: "set_formation", name: "cube" }) : null;
    await new Promise((r) => setTimeout(r, 500));
    expect(entry?.status).toBe("acked");
    const bad = client.send({ kind: "set_formation", name: "starfish" });
    await new Promise((r) => setTimeout(r, 500));
    expect(bad.status).toBe("rejected");
    expect(bad.message).toContain("starfish");
  }, 30000);
});
