// Golden replay: the client's observed vibration sequence must equal the
// server's log exactly (the transport and session add or drop nothing).

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { ConsoleSession } from "../src/session";
import { MockTransport, RecordingSink } from "./helpers";

const fixture = JSON.parse(
  readFileSync(new URL("./fixtures/golden_replay.json", import.meta.url), "utf-8")
);

describe("explore-mode golden replay", () => {
  it("reproduces the server vibration log event for event", () => {
    const transport = new MockTransport();
    const sink = new RecordingSink();
    const session = new ConsoleSession("explore", transport, sink);

    for (const msg of fixture.server_messages) {
      session.handleRaw(msg);
    }
    expect(session.vibrationLog).toEqual(fixture.vibration_log);
    expect(session.banner).toBeNull();
  });

  it("indicator always tracks the latest vibration event", () => {
    const session = new ConsoleSession("explore", new MockTransport(), new RecordingSink());
    for (const msg of fixture.server_messages) {
      session.handleRaw(msg);
      if (msg.type === "vibration") {
        expect(session.vibration).toBe(msg.state);
      }
    }
    const last = fixture.vibration_log[fixture.vibration_log.length - 1];
    expect(session.vibration).toBe(last.state);
  });

  it("draws the texture in explore mode", () => {
    const sink = new RecordingSink();
    const session = new ConsoleSession("explore", new MockTransport(), sink);
    for (const msg of fixture.server_messages) session.handleRaw(msg);
    expect(sink.textureDraws().length).toBe(1);
    expect(session.textureVisible).toBe(true);
    expect(sink.textureDraws()[0].widthPx).toBe(fixture.config.width_px);
  });

  it("malformed server message closes the session with a banner", () => {
    const transport = new MockTransport();
    const session = new ConsoleSession("explore", transport, new RecordingSink());
    session.handleRaw(fixture.server_messages[0]);
    session.handleRaw({ type: "vibration", t_ms: "NaN", state: "hot" });
    expect(session.banner).toContain("malformed server message");
    expect(session.closed).toBe(true);
    expect(transport.closed).toBe(true);
  });
});
