/** Browser entry point: wires the gateway client, view and controls to the
 * DOM. Everything testable lives in the other modules; this file is only
 * glue. */

import { GatewayClient, webSocketTransport } from "./client.js";
import { Controls } from "./controls.js";
import { StateSnapshotMsg } from "./protocol.js";
import {
  SIDE_VIEW,
  Surface,
  TOP_DOWN,
  applySnapshot,
  emptyView,
  renderView,
  statusLine,
} from "./view.js";

function canvasSurface(canvas: HTMLCanvasElement): Surface {
  const ctx = canvas.getContext("2d")!;
  return {
    get width() {
      return canvas.width;
    },
    get height() {
      return canvas.height;
    },
    clear(color) {
      ctx.fillStyle = color;
      ctx.fillRect(0, 0, canvas.width, canvas.height);
    },
    line(x0, y0, x1, y1, color, width = 1) {
      ctx.strokeStyle = color;
      ctx.lineWidth = width;
      ctx.beginPath();
      ctx.moveTo(x0, y0);
      ctx.lineTo(x1, y1);
      ctx.stroke();
    },
    circle(x, y, r, color, fill) {
      ctx.beginPath();
      ctx.arc(x, y, r, 0, Math.PI * 2);
      if (fill) {
        ctx.fillStyle = color;
        ctx.fill();
      } else {
        ctx.strokeStyle = color;
        ctx.stroke();
      }
    },
    text(s, x, y, color) {
      ctx.fillStyle = color;
      ctx.font = "12px system-ui, sans-serif";
      ctx.fillText(s, x, y);
    },
  };
}

const view = emptyView();
const topCanvas = document.getElementById("top-view") as HTMLCanvasElement;
const sideCanvas = document.getElementById("side-view") as HTMLCanvasElement;
const topSurface = canvasSurface(topCanvas);
const sideSurface = canvasSurface(sideCanvas);
const statusEl = document.getElementById("status")!;
const bannerEl = document.getElementById("banner")!;
const historyEl = document.getElementById("history")!;
const formationsEl = document.getElementById("formations")!;
const speedSlider = document.getElementById("speed") as HTMLInputElement;
const speedLabel = document.getElementById("speed-label")!;

let client: GatewayClient | null = null;
let controls: Controls | null = null;

function connect(): void {
  const ws = new WebSocket(`ws://${location.host}/ws`);
  const transport = webSocketTransport(ws);
  const c = new GatewayClient(transport);
  client = c;
  controls = new Controls(c);
  ws.addEventListener("open", () => {
    view.connected = true;
    bannerEl.classList.add("hidden");
  });
  transport.onClose(() => {
    view.connected = false;
    controls?.releaseAll();
    bannerEl.classList.remove("hidden");
  });
  c.onSnapshot = (snap: StateSnapshotMsg) => {
    applySnapshot(view, snap, performance.now());
    if (formationsEl.childElementCount === 0) buildFormationButtons(snap.formations);
  };
  c.onHello = (hello) => buildFormationButtons(hello.formations);
  c.onHistoryChange = renderHistory;
}

function buildFormationButtons(names: string[]): void {
  formationsEl.replaceChildren();
  for (const name of names) {
    const btn = document.createElement("button");
    btn.textContent = name;
    btn.addEventListener("click", () => controls?.setFormation(name));
    formationsEl.appendChild(btn);
  }
}

function renderHistory(): void {
  const entries = client?.history.slice(-8).reverse() ?? [];
  historyEl.replaceChildren(
    ...entries.map((e) => {
      const li = document.createElement("li");
      const label =
        e.command.kind === "set_formation" ? `set_formation ${e.command.name}`
        : e.command.kind === "leader_velocity" ? `leader_velocity [${e.command.velocity.join(", ")}]`
        : e.command.kind === "set_speed" ? `set_speed ${e.command.factor}`
        : e.command.kind;
      li.textContent = `${label} - ${e.status}${e.message ? `: ${e.message}` : ""}`;
      li.className = e.status;
      return li;
    }),
  );
}

document.getElementById("pause")!.addEventListener("click", () => controls?.pause());
document.getElementById("resume")!.addEventListener("click", () => controls?.resume());
document.getElementById("reconnect")!.addEventListener("click", () => connect());
speedSlider.addEventListener("change", () => {
  const factor = Number(speedSlider.value);
  speedLabel.textContent = `${factor}x`;
  controls?.setSpeed(factor);
});

window.addEventListener("keydown", (ev) => {
  if (ev.repeat || ev.target instanceof HTMLInputElement) return;
  controls?.keyDown(ev.key);
});
window.addEventListener("keyup", (ev) => {
  if (ev.target instanceof HTMLInputElement) return;
  controls?.keyUp(ev.key);
});
window.addEventListener("blur", () => controls?.releaseAll());

function frame(): void {
  const now = performance.now();
  renderView(view, topSurface, TOP_DOWN, now);
  renderView(view, sideSurface, SIDE_VIEW, now);
  statusEl.textContent = statusLine(view);
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
