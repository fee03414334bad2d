import { describe, expect, it } from "vitest";

import { SpeedMeter, toTexturePx } from "../src/pointer";

describe("toTexturePx", () => {
  const geom = { cssWidth: 960, cssHeight: 540, textureWidth: 1920, textureHeight: 1080 };

  it("scales a 2x-downscaled canvas back to texture pixels", () => {
    expect(toTexturePx(geom, 480, 270)).toEqual({ x: 960, y: 540 });
    expect(toTexturePx(geom, 100, 50)).toEqual({ x: 200, y: 100 });
  });

  it("clamps positions outside the canvas to the boundary", () => {
    expect(toTexturePx(geom, -10, 20)).toEqual({ x: 0, y: 40 });
    expect(toTexturePx(geom, 5000, 5000)).toEqual({ x: 1919, y: 1079 });
  });

  it("floors to integer pixels", () => {
    expect(toTexturePx(geom, 100.4, 0).x).toBe(200);
    expect(toTexturePx(geom, 100.6, 0).x).toBe(201);
  });
});

describe("SpeedMeter", () => {
  it("reports the path speed over the window", () => {
    const meter = new SpeedMeter(1000);
    meter.push(0, 0, 0);
    meter.push(500, 120, 0);
    meter.push(1000, 240, 0);
    expect(meter.speedPxPerSecond()).toBeCloseTo(240, 5);
  });

  it("handles reversals as path length, not displacement", () => {
    const meter = new SpeedMeter(2000);
    meter.push(0, 0, 0);
    meter.push(500, 100, 0);
    meter.push(1000, 0, 0);
    expect(meter.speedPxPerSecond()).toBeCloseTo(200, 5);
  });

  it("returns zero with fewer than two samples", () => {
    const meter = new SpeedMeter();
    expect(meter.speedPxPerSecond()).toBe(0);
    meter.push(0, 5, 5);
    expect(meter.speedPxPerSecond()).toBe(0);
  });
});
