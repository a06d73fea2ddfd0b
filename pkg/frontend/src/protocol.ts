/** Gateway wire protocol (v1): one JSON object per WebSocket text message. */

export type Vec3 = [number, number, number];

export interface HelloMsg {
  kind: "hello";
  protocol: number;
  scenario: string;
  agents: number;
  dt: number;
  formations: string[];
  leader: number;
}

export interface MissionStatus {
  complete: boolean;
  detection: { tick: number; agent: number; target_est: Vec3 } | null;
  waypoint_index: number[];
}

export interface StateSnapshotMsg {
  kind: "state_snapshot";
  tick: number;
  sim_time: number;
  paused: boolean;
  speed_factor: number;
  formation: string | null;
  formations: string[];
  max_error: number;
  leader: number;
  positions: Vec3[];
  velocities: Vec3[];
  mission: MissionStatus | null;
}

export interface AckMsg {
  kind: "ack";
  id: string | null;
}

export interface ErrorMsg {
  kind: "error";
  id: string | null;
  message: string;
}

export type ServerMsg = HelloMsg | StateSnapshotMsg | AckMsg | ErrorMsg;

export type SwarmCommand =
  | { kind: "set_formation"; name: string }
  | { kind: "leader_velocity"; velocity: Vec3 }
  | { kind: "pause" }
  | { kind: "resume" }
  | { kind: "set_speed"; factor: number }
  | { kind: "stop" };

export interface CommandMsg {
  kind: "command";
  id: string;
  command: SwarmCommand;
}

export function parseServerMsg(raw: string): ServerMsg | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const kind = (doc as { kind?: unknown }).kind;
  if (kind === "hello" || kind === "state_snapshot" || kind === "ack" || kind === "error") {
    return doc as ServerMsg;
  }
  return null;
}

export function encodeCommand(id: string, command: SwarmCommand): string {
  const msg: CommandMsg = { kind: "command", id, command };
  return JSON.stringify(msg);
}
