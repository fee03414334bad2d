import { describe, expect, it } from "vitest";

import {
  FeedbackTone,
  ToneContext,
  countZeroCrossings,
  renderGatedSquare,
} from "../src/audio";

describe("renderGatedSquare", () => {
  it("produces a 120 Hz square for one second of on state", () => {
    const samples = renderGatedSquare([{ t_ms: 0, state: "on" }], 1.0, 48000);
    expect(samples.length).toBe(48000);
    // 240 half-periods -> 239 internal sign flips
    expect(countZeroCrossings(samples)).toBe(239);
    expect(samples.every((s) => s === 1 || s === -1)).toBe(true);
  });

  it("stays silent with no edges or an off edge", () => {
    expect(renderGatedSquare([], 0.5, 8000).every((s) => s === 0)).toBe(true);
    const offOnly = renderGatedSquare([{ t_ms: 0, state: "off" }], 0.5, 8000);
    expect(offOnly.every((s) => s === 0)).toBe(true);
  });

  it("emits one burst per on interval", () => {
    const edges = [
      { t_ms: 0, state: "on" as const },
      { t_ms: 100, state: "off" as const },
      { t_ms: 200, state: "on" as const },
      { t_ms: 300, state: "off" as const },
    ];
    const samples = renderGatedSquare(edges, 0.4, 8000);
    let bursts = 0;
    let inBurst = false;
    for (const s of samples) {
      const active = s !== 0;
      if (active && !inBurst) bursts += 1;
      inBurst = active;
    }
    expect(bursts).toBe(2);
  });

  it("gates precisely at the edge timestamps", () => {
    const samples = renderGatedSquare(
      [
        { t_ms: 0, state: "on" },
        { t_ms: 500, state: "off" },
      ],
      1.0,
      8000
    );
    const firstHalf = samples.slice(0, 4000);
    const secondHalf = samples.slice(4000);
    expect(firstHalf.every((s) => s !== 0)).toBe(true);
    expect(secondHalf.every((s) => s === 0)).toBe(true);
  });
});

function fakeToneContext() {
  const log: string[] = [];
  const ctx: ToneContext = {
    currentTime: 0,
    destination: { sink: true },
    createOscillator: () => ({
      type: "sine",
      frequency: { value: 0 },
      connect: () => log.push("osc-connect"),
      start: () => log.push("osc-start"),
    }),
    createGain: () => ({
      gain: {
        value: -1,
        setTargetAtTime: (v: number) => log.push(`gain->${v}`),
      },
      connect: () => log.push("gain-connect"),
    }),
  };
  return { ctx, log };
}

describe("FeedbackTone", () => {
  it("opens and shuts the gate on vibration state", () => {
    const { ctx, log } = fakeToneContext();
    const tone = new FeedbackTone(ctx);
    expect(tone.available).toBe(true);
    tone.set("on");
    tone.set("off");
    expect(log).toContain("osc-start");
    expect(log.filter((l) => l.startsWith("gain->"))).toEqual([
      "gain->0.25",
      "gain->0",
    ]);
  });

  it("degrades to indicator-only without an audio context", () => {
    const tone = new FeedbackTone(null);
    expect(tone.available).toBe(false);
    tone.set("on"); // must not throw
    expect(tone.state).toBe("on");
  });
});
