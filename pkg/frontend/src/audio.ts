// Audible stand-in for the tactile actuator: a square-wave tone gated by
// the vibration state.  The browser cannot drive skin, so the tone is a
// sensory substitution, not a perceptual equivalent.

export interface VibrationEdge {
  t_ms: number;
  state: "on" | "off";
}

/** Render the gated square wave as raw samples.  Used by the offline
 * fallback renderer and by tests (no audio hardware needed). */
export function renderGatedSquare(
  edges: VibrationEdge[],
  durationS: number,
  sampleRate: number,
  freqHz = 120
): Float32Array {
  const n = Math.floor(durationS * sampleRate);
  const out = new Float32Array(n);
  if (edges.length === 0) return out;
  let edgeIdx = 0;
  let on = false;
  for (let k = 0; k < n; k++) {
    const tMs = (k / sampleRate) * 1000;
    while (edgeIdx < edges.length && edges[edgeIdx].t_ms <= tMs + 1e-9) {
      on = edges[edgeIdx].state === "on";
      edgeIdx += 1;
    }
    if (on) {
      const halfCycles = Math.floor((k / sampleRate) * 2 * freqHz + 1e-9);
      out[k] = halfCycles % 2 === 0 ? 1 : -1;
    }
  }
  return out;
}

export function countZeroCrossings(samples: Float32Array): number {
  let crossings = 0;
  let prev = 0;
  for (const s of samples) {
    if (s !== 0 && prev !== 0 && Math.sign(s) !== Math.sign(prev)) crossings += 1;
    if (s !== 0) prev = s;
  }
  return crossings;
}

// Subset of the WebAudio surface the tone needs, so tests can fake it.
export interface ToneContext {
  currentTime: number;
  createOscillator(): {
    type: string;
    frequency: { value: number };
    connect(node: unknown): void;
    start(): void;
  };
  createGain(): {
    gain: {
      value: number;
      setTargetAtTime(value: number, startTime: number, timeConstant: number): void;
    };
    connect(node: unknown): void;
  };
  destination: unknown;
}

/** Gated 120 Hz tone; open() and shut() ramp the gain briefly to avoid
 * clicks.  Degrades to a no-op when no audio context is available. */
export class FeedbackTone {
  private gainNode: ReturnType<ToneContext["createGain"]> | null = null;
  readonly available: boolean;
  state: "on" | "off" = "off";

  constructor(private ctx: ToneContext | null, freqHz = 120) {
    this.available = ctx !== null;
    if (!ctx) return;
    const osc = ctx.createOscillator();
    osc.type = "square";
    osc.frequency.value = freqHz;
    const gain = ctx.createGain();
    gain.gain.value = 0;
    osc.connect(gain);
    gain.connect(ctx.destination);
    osc.start();
    this.gainNode = gain;
  }

  set(state: "on" | "off"): void {
    this.state = state;
    if (!this.ctx || !this.gainNode) return;
    const target = state === "on" ? 0.25 : 0;
    this.gainNode.gain.setTargetAtTime(target, this.ctx.currentTime, 0.005);
  }
}
