/** View state and rendering.
 *
 * The view is a pure function of what the gateway streamed: the latest
 * snapshot plus per-agent trails accumulated from received snapshots.
 * Nothing here extrapolates or simulates. Rendering goes through a small
 * drawing surface interface so tests can record the draw calls.
 */

import { StateSnapshotMsg, Vec3 } from "./protocol.js";

export const TRAIL_LENGTH = 60;
export const STALE_AFTER_MS = 2000;

export interface ViewState {
  snapshot: StateSnapshotMsg | null;
  trails: Vec3[][];
  connected: boolean;
  lastMessageAt: number;
}

export function emptyView(): ViewState {
  return { snapshot: null, trails: [], connected: false, lastMessageAt: 0 };
}

export function applySnapshot(view: ViewState, snap: StateSnapshotMsg, now: number): void {
  view.snapshot = snap;
  view.lastMessageAt = now;
  if (view.trails.length !== snap.positions.length) {
    view.trails = snap.positions.map(() => []);
  }
  snap.positions.forEach((p, i) => {
    const trail = view.trails[i];
    trail.push([p[0], p[1], p[2]]);
    if (trail.length > TRAIL_LENGTH) trail.shift();
  });
}

export function isStale(view: ViewState, now: number): boolean {
  return view.snapshot !== null && now - view.lastMessageAt > STALE_AFTER_MS;
}

/** Minimal drawing surface; the browser binds it to a 2D canvas context. */
export interface Surface {
  readonly width: number;
  readonly height: number;
  clear(color: string): void;
  line(x0: number, y0: number, x1: number, y1: number, color: string, width?: number): void;
  circle(x: number, y: number, r: number, color: string, fill: boolean): void;
  text(s: string, x: number, y: number, color: string): void;
}

type Axes = { h: 0 | 1 | 2; v: 0 | 1 | 2 };

export const TOP_DOWN: Axes = { h: 0, v: 1 }; // x right, y up
export const SIDE_VIEW: Axes = { h: 0, v: 2 }; // x right, z up

interface Mapping {
  scale: number;
  cx: number;
  cy: number;
  hMid: number;
  vMid: number;
}

function fitMapping(surface: Surface, positions: Vec3[], axes: Axes): Mapping {
  let hMin = Infinity, hMax = -Infinity, vMin = Infinity, vMax = -Infinity;
  for (const p of positions) {
    hMin = Math.min(hMin, p[axes.h]);
    hMax = Math.max(hMax, p[axes.h]);
    vMin = Math.min(vMin, p[axes.v]);
    vMax = Math.max(vMax, p[axes.v]);
  }
  const span = Math.max(hMax - hMin, vMax - vMin, 10) + 6;
  const scale = Math.min(surface.width, surface.height) / span;
  return {
    scale,
    cx: surface.width / 2,
    cy: surface.height / 2,
    hMid: (hMin + hMax) / 2,
    vMid: (vMin + vMax) / 2,
  };
}

function project(m: Mapping, p: Vec3, axes: Axes): [number, number] {
  return [
    m.cx + (p[axes.h] - m.hMid) * m.scale,
    m.cy - (p[axes.v] - m.vMid) * m.scale,
  ];
}

const GRID_STEP = 5; // meters

export function renderView(view: ViewState, surface: Surface, axes: Axes, now: number): void {
  surface.clear("#10141c");
  const snap = view.snapshot;
  if (snap === null || snap.positions.length === 0) {
    drawGrid(surface, { scale: Math.min(surface.width, surface.height) / 20, cx: surface.width / 2, cy: surface.height / 2, hMid: 0, vMid: 0 });
    surface.text(view.connected ? "waiting for agents" : "disconnected", 12, 20, "#8899aa");
    return;
  }
  const m = fitMapping(surface, snap.positions, axes);
  drawGrid(surface, m);
  snap.positions.forEach((p, i) => {
    const trail = view.trails[i] ?? [];
    for (let k = 1; k < trail.length; k++) {
      const [x0, y0] = project(m, trail[k - 1], axes);
      const [x1, y1] = project(m, trail[k], axes);
      surface.line(x0, y0, x1, y1, "rgba(110,170,250,0.25)");
    }
    const [x, y] = project(m, p, axes);
    const leader = i === snap.leader;
    surface.circle(x, y, leader ? 7 : 5, leader ? "#ffb347" : "#6eaafa", true);
    if (leader) surface.circle(x, y, 10, "#ffb347", false);
    surface.text(`uav${i + 1}`, x + 9, y - 6, "#ccd6e4"); // ids shown 1-based
  });
  if (isStale(view, now)) {
    surface.text("STALE: no data for > 2 s", 12, 20, "#ff6b6b");
  }
}

function drawGrid(surface: Surface, m: Mapping): void {
  const step = GRID_STEP * m.scale;
  if (step < 8) return;
  const offX = ((m.cx - (m.hMid % GRID_STEP) * m.scale) % step + step) % step;
  const offY = ((m.cy + (m.vMid % GRID_STEP) * m.scale) % step + step) % step;
  for (let x = offX; x < surface.width; x += step) {
    surface.line(x, 0, x, surface.height, "#1c2330");
  }
  for (let y = offY; y < surface.height; y += step) {
    surface.line(0, y, surface.width, y, "#1c2330");
  }
}

export function statusLine(view: ViewState): string {
  const snap = view.snapshot;
  if (!view.connected && snap === null) return "disconnected";
  if (snap === null) return "connected, waiting for stream";
  const pauseTag = snap.paused ? " [paused]" : "";
  const speed = snap.speed_factor === 0 ? "free-run" : `${snap.speed_factor}x`;
  const formation = snap.formation ?? "none";
  let line =
    `t=${snap.sim_time.toFixed(2)}s  tick ${snap.tick}${pauseTag}  ${speed}  ` +
    `formation: ${formation}  max error: ${snap.max_error.toFixed(3)} m`;
  if (snap.mission) {
    line += snap.mission.complete && snap.mission.detection
      ? `  mission: target found by uav${snap.mission.detection.agent + 1}`
      : "  mission: searching";
  }
  return line;
}
