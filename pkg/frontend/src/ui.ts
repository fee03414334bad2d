// DOM wiring: socket, canvas, phase indicator, response buttons, download.
// All behaviour lives in session.ts; this file only forwards events.

import { FeedbackTone, ToneContext } from "./audio";
import { SpeedMeter, toTexturePx } from "./pointer";
import { ClientMessage, Mode, StartConfig } from "./protocol";
import { ConsoleSession, TextureSink, Transport } from "./session";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class CanvasSink implements TextureSink {
  constructor(private canvas: HTMLCanvasElement) {}

  showBlankField(widthPx: number, heightPx: number): void {
    this.canvas.width = widthPx;
    this.canvas.height = heightPx;
    const ctx = this.canvas.getContext("2d")!;
    ctx.fillStyle = "#d8d8d8";
    ctx.fillRect(0, 0, widthPx, heightPx);
  }

  drawTexture(widthPx: number, heightPx: number, pgmBase64: string): void {
    this.canvas.width = widthPx;
    this.canvas.height = heightPx;
    const bytes = Uint8Array.from(atob(pgmBase64), (c) => c.charCodeAt(0));
    const image = decodePgm(bytes, widthPx, heightPx);
    this.canvas.getContext("2d")!.putImageData(image, 0, 0);
  }
}

function decodePgm(bytes: Uint8Array, width: number, height: number): ImageData {
  // binary P5 with maxval 255: raster starts after the third header newline
  let cuts = 0;
  let offset = 0;
  while (offset < bytes.length && cuts < 3) {
    if (bytes[offset] === 0x0a) cuts += 1;
    offset += 1;
  }
  const image = new ImageData(width, height);
  for (let i = 0; i < width * height; i++) {
    const g = bytes[offset + i];
    image.data[4 * i] = g;
    image.data[4 * i + 1] = g;
    image.data[4 * i + 2] = g;
    image.data[4 * i + 3] = 255;
  }
  return image;
}

export function boot(): void {
  const canvas = el<HTMLCanvasElement>("field");
  const phaseLabel = el<HTMLSpanElement>("phase");
  const vibLabel = el<HTMLSpanElement>("vibration");
  const speedLabel = el<HTMLSpanElement>("speed");
  const bannerBox = el<HTMLDivElement>("banner");
  const firstBtn = el<HTMLButtonElement>("btn-first");
  const secondBtn = el<HTMLButtonElement>("btn-second");
  const downloadBtn = el<HTMLButtonElement>("btn-download");
  const connectBtn = el<HTMLButtonElement>("btn-connect");
  const modeSelect = el<HTMLSelectElement>("mode");
  const stripeInput = el<HTMLInputElement>("stripe-width");
  const audioToggle = el<HTMLInputElement>("audio-enabled");

  let session: ConsoleSession | null = null;
  let tone: FeedbackTone | null = null;
  const meter = new SpeedMeter();
  let lastPointer: { x: number; y: number } | null = null;
  const epoch = performance.now();

  function refreshButtons() {
    const enabled = session?.canRespond() ?? false;
    firstBtn.disabled = !enabled;
    secondBtn.disabled = !enabled;
    downloadBtn.disabled = !(session?.trialsCsv || session?.mode === "explore");
  }

  connectBtn.addEventListener("click", () => {
    const mode = modeSelect.value as Mode;
    const url = `ws://${location.host}/session`;
    const socket = new WebSocket(url);
    const transport: Transport = {
      send: (msg: ClientMessage) => {
        if (socket.readyState === WebSocket.OPEN) socket.send(JSON.stringify(msg));
      },
      close: () => socket.close(),
    };
    const audioCtx = audioToggle.checked
      ? (new (window.AudioContext ??
          (window as never))() as unknown as ToneContext)
      : null;
    tone = new FeedbackTone(audioCtx);
    if (!tone.available && audioToggle.checked) {
      bannerBox.textContent = "audio unavailable: running indicator-only";
    }

    session = new ConsoleSession(mode, transport, new CanvasSink(canvas), {
      onVibration: (state) => {
        vibLabel.textContent = state;
        vibLabel.className = state;
        tone?.set(state);
      },
      onPhase: (phase, trial, set) => {
        phaseLabel.textContent = `set ${set} trial ${trial}: ${phase}`;
        refreshButtons();
      },
      onDone: () => {
        phaseLabel.textContent = "done";
        refreshButtons();
      },
      onError: (banner) => {
        bannerBox.textContent = banner;
      },
    });

    socket.addEventListener("open", () => {
      const config: StartConfig =
        mode === "explore"
          ? { stripe_width_px: Number(stripeInput.value) || 8 }
          : { participant_id: "browser", touch_s: 5.0, rest_s: 1.0 };
      session!.start(config);
    });
    socket.addEventListener("message", (ev) => session!.handleRaw(JSON.parse(ev.data)));
    socket.addEventListener("close", () => {
      if (session && !session.done() && session.mode === "experiment") {
        bannerBox.textContent = "connection lost: session aborted server-side";
      }
    });
  });

  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    if (!session) return;
    lastPointer = toTexturePx(
      {
        cssWidth: rect.width,
        cssHeight: rect.height,
        textureWidth: session.fieldWidth || canvas.width,
        textureHeight: session.fieldHeight || canvas.height,
      },
      ev.clientX - rect.left,
      ev.clientY - rect.top
    );
  });
  canvas.addEventListener("pointerleave", () => {
    // final message at the clamped boundary is sent by the frame loop
  });

  firstBtn.addEventListener("click", () => {
    session?.respond("first", performance.now() - epoch);
    refreshButtons();
  });
  secondBtn.addEventListener("click", () => {
    session?.respond("second", performance.now() - epoch);
    refreshButtons();
  });
  downloadBtn.addEventListener("click", () => {
    const csv = session?.trialsCsv;
    if (!csv) return;
    const blob = new Blob([csv], { type: "text/csv" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "trials.csv";
    a.click();
    URL.revokeObjectURL(a.href);
  });

  function frameLoop() {
    if (session && lastPointer) {
      const t = performance.now() - epoch;
      session.nextFrame();
      session.pointerFrame(t, lastPointer.x, lastPointer.y);
      meter.push(t, lastPointer.x, lastPointer.y);
      speedLabel.textContent = `${meter.speedPxPerSecond().toFixed(0)} px/s`;
    }
    refreshButtons();
    requestAnimationFrame(frameLoop);
  }
  requestAnimationFrame(frameLoop);
}
