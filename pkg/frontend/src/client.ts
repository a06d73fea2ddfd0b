/** Gateway client: correlates command acks, surfaces the snapshot stream.
 *
 * The transport is injected so tests can substitute a mock gateway and the
 * integration test can wrap a Node `ws` socket; the browser entry point
 * wraps a native WebSocket.
 */

import {
  HelloMsg,
  ServerMsg,
  StateSnapshotMsg,
  SwarmCommand,
  encodeCommand,
  parseServerMsg,
} from "./protocol.js";

export interface Transport {
  send(text: string): void;
  close(): void;
  onMessage(handler: (text: string) => void): void;
  onClose(handler: () => void): void;
}

export interface HistoryEntry {
  id: string;
  command: SwarmCommand;
  status: "pending" | "acked" | "rejected";
  message?: string;
}

export class GatewayClient {
  hello: HelloMsg | null = null;
  history: HistoryEntry[] = [];
  onSnapshot: (snap: StateSnapshotMsg) => void = () => {};
  onHello: (hello: HelloMsg) => void = () => {};
  onHistoryChange: () => void = () => {};
  private transport: Transport;
  private nextId = 1;

  constructor(transport: Transport) {
    this.transport = transport;
    transport.onMessage((text) => this.handle(text));
  }

  private handle(text: string): void {
    const msg: ServerMsg | null = parseServerMsg(text);
    if (msg === null) return;
    if (msg.kind === "hello") {
      this.hello = msg;
      this.onHello(msg);
    } else if (msg.kind === "state_snapshot") {
      this.onSnapshot(msg);
    } else {
      const entry = this.history.find((h) => h.id === msg.id);
      if (entry) {
        entry.status = msg.kind === "ack" ? "acked" : "rejected";
        if (msg.kind === "error") entry.message = msg.message;
        this.onHistoryChange();
      }
    }
  }

  send(command: SwarmCommand): HistoryEntry {
    const id = `c${this.nextId++}`;
    const entry: HistoryEntry = { id, command, status: "pending" };
    this.history.push(entry);
    if (this.history.length > 50) this.history.shift();
    this.transport.send(encodeCommand(id, command));
    this.onHistoryChange();
    return entry;
  }

  close(): void {
    this.transport.close();
  }
}

/** Wrap a browser (or ws-package) WebSocket as a Transport. */
export function webSocketTransport(ws: {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, cb: (ev: { data?: unknown }) => void): void;
}): Transport {
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onMessage: (handler) =>
      ws.addEventListener("message", (ev) => handler(String(ev.data))),
    onClose: (handler) => ws.addEventListener("close", () => handler()),
  };
}
