// Wire protocol of the session service: JSON messages over /session.

export type Mode = "explore" | "experiment";
export type PhaseName = "first" | "rest" | "second" | "respond";
export type VibrationState = "on" | "off";
export type ChoiceName = "first" | "second";

export interface StartConfig {
  stripe_width_px?: number;
  width_px?: number;
  height_px?: number;
  show_texture?: boolean;
  participant_id?: string;
  textures?: number[];
  sets?: number;
  pairs_per_set?: number;
  touch_s?: number;
  rest_s?: number;
  seed?: number;
}

export type ClientMessage =
  | { type: "start"; mode: Mode; config: StartConfig }
  | { type: "pointer"; t_ms: number; x_px: number; y_px: number }
  | { type: "response"; choice: ChoiceName };

export type ServerMessage =
  | { type: "started"; session_id: string }
  | { type: "phase"; phase: PhaseName; trial: number; set: number }
  | { type: "vibration"; t_ms: number; state: VibrationState; freq_hz: number }
  | {
      type: "texture";
      show: boolean;
      width_px: number;
      height_px: number;
      pgm_base64?: string;
    }
  | { type: "done"; artifacts: string[]; trials_csv?: string }
  | { type: "error"; code: string; detail: string };

const PHASES: readonly string[] = ["first", "rest", "second", "respond"];

export class ProtocolError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

function req(cond: boolean, what: string): asserts cond {
  if (!cond) throw new ProtocolError(`malformed server message: ${what}`);
}

export function parseServerMessage(raw: unknown): ServerMessage {
  req(typeof raw === "object" && raw !== null, "not an object");
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "started":
      req(typeof msg.session_id === "string", "started.session_id");
      return { type: "started", session_id: msg.session_id as string };
    case "phase":
      req(PHASES.includes(msg.phase as string), "phase.phase");
      req(typeof msg.trial === "number", "phase.trial");
      req(typeof msg.set === "number", "phase.set");
      return {
        type: "phase",
        phase: msg.phase as PhaseName,
        trial: msg.trial as number,
        set: msg.set as number,
      };
    case "vibration":
      req(typeof msg.t_ms === "number", "vibration.t_ms");
      req(msg.state === "on" || msg.state === "off", "vibration.state");
      req(typeof msg.freq_hz === "number", "vibration.freq_hz");
      return {
        type: "vibration",
        t_ms: msg.t_ms as number,
        state: msg.state as VibrationState,
        freq_hz: msg.freq_hz as number,
      };
    case "texture":
      req(typeof msg.show === "boolean", "texture.show");
      req(typeof msg.width_px === "number", "texture.width_px");
      req(typeof msg.height_px === "number", "texture.height_px");
      req(
        msg.pgm_base64 === undefined || typeof msg.pgm_base64 === "string",
        "texture.pgm_base64"
      );
      return {
        type: "texture",
        show: msg.show as boolean,
        width_px: msg.width_px as number,
        height_px: msg.height_px as number,
        pgm_base64: msg.pgm_base64 as string | undefined,
      };
    case "done":
      req(Array.isArray(msg.artifacts), "done.artifacts");
      req(
        msg.trials_csv === undefined || typeof msg.trials_csv === "string",
        "done.trials_csv"
      );
      return {
        type: "done",
        artifacts: msg.artifacts as string[],
        trials_csv: msg.trials_csv as string | undefined,
      };
    case "error":
      req(typeof msg.code === "string", "error.code");
      return {
        type: "error",
        code: msg.code as string,
        detail: String(msg.detail ?? ""),
      };
    default:
      throw new ProtocolError(`malformed server message: unknown type ${String(msg.type)}`);
  }
}

export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}
