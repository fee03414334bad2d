import { ClientMessage } from "../src/protocol";
import { TextureSink, Transport } from "../src/session";

export class MockTransport implements Transport {
  sent: ClientMessage[] = [];
  closed = false;

  send(msg: ClientMessage): void {
    this.sent.push(msg);
  }

  close(): void {
    this.closed = true;
  }
}

export interface DrawCall {
  kind: "texture" | "blank";
  widthPx: number;
  heightPx: number;
  pgmBase64?: string;
}

export class RecordingSink implements TextureSink {
  calls: DrawCall[] = [];

  drawTexture(widthPx: number, heightPx: number, pgmBase64: string): void {
    this.calls.push({ kind: "texture", widthPx, heightPx, pgmBase64 });
  }

  showBlankField(widthPx: number, heightPx: number): void {
    this.calls.push({ kind: "blank", widthPx, heightPx });
  }

  textureDraws(): DrawCall[] {
    return this.calls.filter((c) => c.kind === "texture");
  }
}
