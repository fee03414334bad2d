// Pointer coordinate mapping and live speed readout.

export interface CanvasGeometry {
  cssWidth: number;
  cssHeight: number;
  textureWidth: number;
  textureHeight: number;
}

/** Map a pointer position in canvas CSS coordinates to texture pixels,
 * clamped to the texture bounds (a pointer leaving the canvas reports the
 * clamped boundary position). */
export function toTexturePx(
  geom: CanvasGeometry,
  cssX: number,
  cssY: number
): { x: number; y: number } {
  const sx = geom.textureWidth / geom.cssWidth;
  const sy = geom.textureHeight / geom.cssHeight;
  const x = Math.min(Math.max(Math.floor(cssX * sx), 0), geom.textureWidth - 1);
  const y = Math.min(Math.max(Math.floor(cssY * sy), 0), geom.textureHeight - 1);
  return { x, y };
}

/** Sliding-window cursor speed estimate in texture px/s, for the explore
 * panel's live readout. */
export class SpeedMeter {
  private samples: { t: number; x: number; y: number }[] = [];

  constructor(private windowMs = 500) {}

  push(tMs: number, x: number, y: number): void {
    this.samples.push({ t: tMs, x, y });
    const cutoff = tMs - this.windowMs;
    while (this.samples.length > 1 && this.samples[0].t < cutoff) {
      this.samples.shift();
    }
  }

  speedPxPerSecond(): number {
    if (this.samples.length < 2) return 0;
    let path = 0;
    for (let i = 1; i < this.samples.length; i++) {
      const a = this.samples[i - 1];
      const b = this.samples[i];
      path += Math.hypot(b.x - a.x, b.y - a.y);
    }
    const span = (this.samples[this.samples.length - 1].t - this.samples[0].t) / 1000;
    return span > 0 ? path / span : 0;
  }
}
