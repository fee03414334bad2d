// Client session state machine, transport- and DOM-agnostic so the whole
// behaviour is testable headless.  The UI layer owns the real socket,
// canvas, and audio nodes and forwards through the interfaces below.

import {
  ChoiceName,
  ClientMessage,
  Mode,
  PhaseName,
  ProtocolError,
  ServerMessage,
  StartConfig,
  VibrationState,
  parseServerMessage,
} from "./protocol";

export interface Transport {
  send(msg: ClientMessage): void;
  close(): void;
}

// Minimal surface the session needs from a drawing target; the real one
// wraps a <canvas>, tests use a recorder.
export interface TextureSink {
  drawTexture(widthPx: number, heightPx: number, pgmBase64: string): void;
  showBlankField(widthPx: number, heightPx: number): void;
}

export interface SessionHooks {
  onVibration?(state: VibrationState, freqHz: number): void;
  onPhase?(phase: PhaseName, trial: number, set: number): void;
  onDone?(artifacts: string[], trialsCsv: string | null): void;
  onError?(banner: string): void;
}

export interface TrialResponseRow {
  set: number;
  trial: number;
  choice: ChoiceName;
  respondedAtMs: number;
}

export interface VibrationRecord {
  t_ms: number;
  state: VibrationState;
}

export class ConsoleSession {
  readonly mode: Mode;
  sessionId: string | null = null;
  phase: PhaseName | null = null;
  trial = 0;
  set = 0;
  vibration: VibrationState = "off";
  vibrationLog: VibrationRecord[] = [];
  textureVisible = false;
  fieldWidth = 0;
  fieldHeight = 0;
  responses: TrialResponseRow[] = [];
  artifacts: string[] | null = null;
  trialsCsv: string | null = null;
  banner: string | null = null;
  closed = false;
  warnings: string[] = [];

  private lastPointerSentAtFrame = -1;
  private frameCounter = 0;

  constructor(
    mode: Mode,
    private transport: Transport,
    private sink: TextureSink,
    private hooks: SessionHooks = {}
  ) {
    this.mode = mode;
  }

  start(config: StartConfig): void {
    this.transport.send({ type: "start", mode: this.mode, config });
  }

  /** Advance the animation-frame counter; pointer sends are throttled to
   * one per frame. */
  nextFrame(): void {
    this.frameCounter += 1;
  }

  pointerFrame(tMs: number, xPx: number, yPx: number): boolean {
    if (this.closed || this.done()) return false;
    if (this.lastPointerSentAtFrame === this.frameCounter) return false;
    this.lastPointerSentAtFrame = this.frameCounter;
    this.transport.send({
      type: "pointer",
      t_ms: Math.round(tMs),
      x_px: Math.round(xPx),
      y_px: Math.round(yPx),
    });
    return true;
  }

  canRespond(): boolean {
    return this.mode === "experiment" && this.phase === "respond" && !this.done();
  }

  respond(choice: ChoiceName, nowMs: number): boolean {
    if (!this.canRespond()) return false;
    this.responses.push({
      set: this.set,
      trial: this.trial,
      choice,
      respondedAtMs: nowMs,
    });
    this.transport.send({ type: "response", choice });
    return true;
  }

  done(): boolean {
    return this.artifacts !== null;
  }

  handleRaw(raw: unknown): void {
    let msg: ServerMessage;
    try {
      msg = parseServerMessage(raw);
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.fail(err.message);
        return;
      }
      throw err;
    }
    this.handleServer(msg);
  }

  handleServer(msg: ServerMessage): void {
    switch (msg.type) {
      case "started":
        this.sessionId = msg.session_id;
        break;
      case "phase":
        this.phase = msg.phase;
        this.trial = msg.trial;
        this.set = msg.set;
        this.hooks.onPhase?.(msg.phase, msg.trial, msg.set);
        break;
      case "vibration":
        this.vibration = msg.state;
        this.vibrationLog.push({ t_ms: msg.t_ms, state: msg.state });
        this.hooks.onVibration?.(msg.state, msg.freq_hz);
        break;
      case "texture":
        this.fieldWidth = msg.width_px;
        this.fieldHeight = msg.height_px;
        if (this.mode === "experiment") {
          // participants trace a blank field: never draw texture pixels,
          // even if a payload sneaks in
          if (msg.pgm_base64 !== undefined) {
            this.warnings.push("texture payload ignored in experiment mode");
          }
          this.textureVisible = false;
          this.sink.showBlankField(msg.width_px, msg.height_px);
        } else if (msg.show && msg.pgm_base64 !== undefined) {
          this.textureVisible = true;
          this.sink.drawTexture(msg.width_px, msg.height_px, msg.pgm_base64);
        } else {
          this.textureVisible = false;
          this.sink.showBlankField(msg.width_px, msg.height_px);
        }
        break;
      case "done":
        this.artifacts = msg.artifacts;
        this.trialsCsv = msg.trials_csv ?? null;
        this.hooks.onDone?.(msg.artifacts, this.trialsCsv);
        break;
      case "error":
        this.banner = `${msg.code}: ${msg.detail}`;
        this.hooks.onError?.(this.banner);
        break;
    }
  }

  private fail(banner: string): void {
    this.banner = banner;
    this.closed = true;
    this.hooks.onError?.(banner);
    this.transport.close();
  }
}

const REQUIRED_CSV_COLUMNS = [
  "participant_id",
  "set_index",
  "trial_index",
  "first_px",
  "second_px",
  "response",
];

/** Validate a downloaded trials CSV the same way the analysis tooling
 * will: required columns present, responses well-formed. */
export function validateTrialsCsv(text: string): { rows: number } {
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) throw new Error("empty trials CSV");
  const header = lines[0].split(",").map((h) => h.trim());
  for (const col of REQUIRED_CSV_COLUMNS) {
    if (!header.includes(col)) throw new Error(`missing column '${col}'`);
  }
  const responseIdx = header.indexOf("response");
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 1}: expected ${header.length} columns`);
    }
    const response = cells[responseIdx];
    if (response !== "first" && response !== "second") {
      throw new Error(`row ${i + 1}: invalid response '${response}'`);
    }
  }
  return { rows: lines.length - 1 };
}
