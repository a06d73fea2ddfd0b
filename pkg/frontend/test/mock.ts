/** Mock gateway transport: records outbound frames, lets tests inject
 * server messages. */

import { Transport } from "../src/client.js";

export class MockGateway implements Transport {
  sent: string[] = [];
  closed = false;
  autoAck: boolean;
  private messageHandler: (text: string) => void = () => {};
  private closeHandler: () => void = () => {};

  constructor(opts: { autoAck?: boolean } = {}) {
    this.autoAck = opts.autoAck ?? false;
  }

  send(text: string): void {
    this.sent.push(text);
    if (this.autoAck) {
      const doc = JSON.parse(text);
      this.push({ kind: "ack", id: doc.id });
    }
  }

  close(): void {
    this.closed = true;
    this.closeHandler();
  }

  onMessage(handler: (text: string) => void): void {
    this.messageHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }

  push(msg: unknown): void {
    this.messageHandler(JSON.stringify(msg));
  }

  sentCommands(): unknown[] {
    return this.sent.map((s) => JSON.parse(s).command);
  }
}
