/** User actions -> wire commands.
 *
 * Keyboard steering holds the leader at a constant velocity while keys are
 * down and zeroes it on release. A leader_velocity command goes out only
 * when the resulting vector actually changes, so key autorepeat and
 * redundant events emit nothing: the wire traffic matches user actions
 * one for one.
 */

import { GatewayClient } from "./client.js";
import { Vec3 } from "./protocol.js";

export const STEER_SPEED = 1.0; // m/s per axis

// top-down: W/S = +/-y, D/A = +/-x; R/F = climb/descend
const KEY_AXES: Record<string, [number, number]> = {
  w: [1, 1], arrowup: [1, 1],
  s: [1, -1], arrowdown: [1, -1],
  d: [0, 1], arrowright: [0, 1],
  a: [0, -1], arrowleft: [0, -1],
  r: [2, 1],
  f: [2, -1],
};

export class Controls {
  private client: GatewayClient;
  private held = new Set<string>();
  private lastSent: Vec3 | null = null;

  constructor(client: GatewayClient) {
    this.client = client;
  }

  setFormation(name: string): void {
    this.client.send({ kind: "set_formation", name });
  }

  pause(): void {
    this.client.send({ kind: "pause" });
  }

  resume(): void {
    this.client.send({ kind: "resume" });
  }

  setSpeed(factor: number): void {
    this.client.send({ kind: "set_speed", factor });
  }

  keyDown(key: string): void {
    const k = key.toLowerCase();
    if (!(k in KEY_AXES) || this.held.has(k)) return;
    this.held.add(k);
    this.pushVelocity();
  }

  keyUp(key: string): void {
    const k = key.toLowerCase();
    if (!this.held.delete(k)) return;
    this.pushVelocity();
  }

  releaseAll(): void {
    if (this.held.size === 0) return;
    this.held.clear();
    this.pushVelocity();
  }

  velocity(): Vec3 {
    const v: Vec3 = [0, 0, 0];
    for (const k of this.held) {
      const [axis, sign] = KEY_AXES[k];
      v[axis] += sign * STEER_SPEED;
    }
    return v;
  }

  private pushVelocity(): void {
    const v = this.velocity();
    if (this.lastSent !== null && v.every((c, i) => c === this.lastSent![i])) return;
    this.lastSent = v;
    this.client.send({ kind: "leader_velocity", velocity: v });
  }
}
