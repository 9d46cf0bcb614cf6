/**
 * Demo wiring: drawing pad -> session channel -> looped preset audio.
 *
 * All gain values come from the service; this file only moves them
 * into the audio graph. The tactile pattern is drawn in the side panel
 * and can be auditioned on a second channel as an "audible preview"
 * stand-in for a vibration actuator.
 */

import { LoopPlayer, decodeWavPcm16 } from "./audio.js";
import { StrokeBuffer, drawStrokes } from "./draw.js";
import { PresetInfo } from "./protocol.js";
import { SessionClient } from "./session.js";
import { normalizePressure } from "./stream.js";
import { drawWaveform, waveformGeometry } from "./waveform.js";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

const canvas = element<HTMLCanvasElement>("pad");
const waveformCanvas = element<HTMLCanvasElement>("waveform");
const penSelect = element<HTMLSelectElement>("pen");
const statusLine = element<HTMLElement>("status");
const gainMeter = element<HTMLElement>("gain");
const tactileToggle = element<HTMLInputElement>("tactile-preview");

const padCtx = canvas.getContext("2d")!;
const waveCtx = waveformCanvas.getContext("2d")!;
const strokes = new StrokeBuffer();

let audioCtx: AudioContext | null = null;
let soundPlayer: LoopPlayer | null = null;
let tactilePlayer: LoopPlayer | null = null;
let presets: PresetInfo[] = [];
let sessionStart = performance.now();

function setStatus(text: string, isError = false): void {
  statusLine.textContent = text;
  statusLine.classList.toggle("error", isError);
}

const session = new SessionClient(
  () => {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    return new WebSocket(`${proto}://${location.host}/session`);
  },
  {
    onGain: (gain, rampMs) => {
      soundPlayer?.setGain(gain, rampMs);
      if (tactileToggle.checked) {
        tactilePlayer?.setGain(gain, rampMs);
      }
      gainMeter.style.width = `${Math.round(gain * 100)}%`;
    },
    onError: (message) => setStatus(`service: ${message}`, true),
    onStatus: (connected) =>
      setStatus(connected ? "connected - draw to hear the pen" : "connection lost", !connected),
  },
);

async function ensureAudio(): Promise<void> {
  if (audioCtx !== null) {
    return;
  }
  audioCtx = new AudioContext();
  soundPlayer = new LoopPlayer(audioCtx);
  tactilePlayer = new LoopPlayer(audioCtx);
  await loadPen(penSelect.value);
  soundPlayer.start();
  tactilePlayer.start();
}

async function loadPen(name: string): Promise<void> {
  const preset = presets.find((p) => p.name === name);
  if (preset === undefined || soundPlayer === null || tactilePlayer === null) {
    return;
  }
  try {
    await soundPlayer.load(preset.audio_url);
    await tactilePlayer.load(preset.tactile_url);
    await renderPattern(preset);
  } catch (err) {
    setStatus(String(err), true);
  }
}

async function renderPattern(preset: PresetInfo): Promise<void> {
  const [patternResponse, tactileResponse] = await Promise.all([
    fetch(preset.pattern_url),
    fetch(preset.tactile_url),
  ]);
  if (!patternResponse.ok || !tactileResponse.ok) {
    throw new Error("pattern assets unavailable");
  }
  const pattern = await patternResponse.json();
  const decoded = decodeWavPcm16(await tactileResponse.arrayBuffer());
  const geometry = waveformGeometry(
    decoded.samples,
    pattern.sub_patterns.length,
    waveformCanvas.width,
  );
  drawWaveform(waveCtx, geometry, waveformCanvas.width, waveformCanvas.height);
}

function pointFromEvent(event: PointerEvent) {
  const rect = canvas.getBoundingClientRect();
  return {
    t: (performance.now() - sessionStart) / 1000,
    x: event.clientX - rect.left,
    y: event.clientY - rect.top,
    p: normalizePressure(event.pressure, event.pointerType),
    pen: penSelect.value,
  };
}

canvas.addEventListener("pointerdown", (event) => {
  void ensureAudio();
  canvas.setPointerCapture(event.pointerId);
  strokes.beginStroke();
  const point = pointFromEvent(event);
  strokes.append({ x: point.x, y: point.y, pressure: point.p });
  session.sendPoint(point);
  drawStrokes(padCtx, strokes, canvas.width, canvas.height);
});

canvas.addEventListener("pointermove", (event) => {
  if (!strokes.isDrawing) {
    return;
  }
  const point = pointFromEvent(event);
  strokes.append({ x: point.x, y: point.y, pressure: point.p });
  session.sendPoint(point);
  drawStrokes(padCtx, strokes, canvas.width, canvas.height);
});

function finishStroke(event: PointerEvent): void {
  if (!strokes.isDrawing) {
    return;
  }
  session.sendPoint(pointFromEvent(event));
  strokes.endStroke();
  session.penUp();
}

canvas.addEventListener("pointerup", finishStroke);
canvas.addEventListener("pointercancel", finishStroke);

penSelect.addEventListener("change", () => {
  // loop swaps at the next boundary inside LoopPlayer
  void loadPen(penSelect.value);
});

tactileToggle.addEventListener("change", () => {
  if (!tactileToggle.checked) {
    tactilePlayer?.setGain(0);
  }
});

element<HTMLButtonElement>("clear").addEventListener("click", () => {
  strokes.clear();
  drawStrokes(padCtx, strokes, canvas.width, canvas.height);
});

async function boot(): Promise<void> {
  try {
    const response = await fetch("/presets");
    if (!response.ok) {
      throw new Error(`preset listing failed (${response.status})`);
    }
    presets = await response.json();
  } catch (err) {
    setStatus(String(err), true);
    return;
  }
  penSelect.innerHTML = "";
  for (const preset of presets) {
    const option = document.createElement("option");
    option.value = preset.name;
    option.textContent = preset.name;
    penSelect.appendChild(option);
  }
  session.connect();
  if (presets.length > 0) {
    const first = presets[0];
    const pattern = await (await fetch(first.pattern_url)).json();
    const tactile = decodeWavPcm16(await (await fetch(first.tactile_url)).arrayBuffer());
    drawWaveform(
      waveCtx,
      waveformGeometry(tactile.samples, pattern.sub_patterns.length, waveformCanvas.width),
      waveformCanvas.width,
      waveformCanvas.height,
    );
  }
}

void boot();
