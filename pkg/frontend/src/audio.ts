/**
 * Loop playback with ramped gain.
 *
 * The pure parts (WAV decoding, offline gain rendering, RMS) are kept
 * free of WebAudio so they run in node tests; LoopPlayer wraps them for
 * the browser with an AudioContext, applying every gain change as a
 * short linear ramp (default 20 ms) to avoid zipper noise.
 */

export const GAIN_RAMP_MS = 20;
export const DISCONNECT_RAMP_MS = 100;

/** Minimal RIFF reader for the service's 16-bit PCM mono WAV assets. */
export function decodeWavPcm16(buffer: ArrayBuffer): {
  sampleRate: number;
  samples: Float64Array;
} {
  const view = new DataView(buffer);
  const tag = (offset: number) =>
    String.fromCharCode(view.getUint8(offset), view.getUint8(offset + 1),
                        view.getUint8(offset + 2), view.getUint8(offset + 3));
  if (buffer.byteLength < 44 || tag(0) !== "RIFF" || tag(8) !== "WAVE") {
    throw new Error("not a RIFF/WAVE file");
  }
  let offset = 12;
  let sampleRate = 0;
  let channels = 1;
  let bitsPerSample = 0;
  let dataStart = -1;
  let dataLength = 0;
  while (offset + 8 <= buffer.byteLength) {
    const chunkId = tag(offset);
    const chunkSize = view.getUint32(offset + 4, true);
    if (chunkId === "fmt ") {
      const audioFormat = view.getUint16(offset + 8, true);
      channels = view.getUint16(offset + 10, true);
      sampleRate = view.getUint32(offset + 12, true);
      bitsPerSample = view.getUint16(offset + 22, true);
      if (audioFormat !== 1 || bitsPerSample !== 16) {
        throw new Error("only 16-bit PCM supported");
      }
    } else if (chunkId === "data") {
      dataStart = offset + 8;
      dataLength = chunkSize;
    }
    offset += 8 + chunkSize + (chunkSize % 2);
  }
  if (sampleRate === 0 || dataStart < 0) {
    throw new Error("missing fmt or data chunk");
  }
  const frameCount = Math.floor(dataLength / 2 / channels);
  const samples = new Float64Array(frameCount);
  for (let i = 0; i < frameCount; i++) {
    samples[i] = view.getInt16(dataStart + i * channels * 2, true) / 32768;
  }
  return { sampleRate, samples };
}

export interface GainEvent {
  sample: number;
  gain: number;
}

/**
 * Offline rendering of looped playback under a stream of gain targets,
 * each approached with a linear ramp of rampSamples. Mirrors what the
 * GainNode automation does, so playback loudness is testable without
 * an audio device.
 */
export function renderLoopWithGain(
  loop: ArrayLike<number>,
  totalSamples: number,
  events: GainEvent[],
  rampSamples: number,
): Float64Array {
  const ordered = [...events].sort((a, b) => a.sample - b.sample);
  const out = new Float64Array(totalSamples);
  let gain = 0;
  let rampFrom = 0;
  let rampStart = -1;
  let target = 0;
  let next = 0;
  for (let i = 0; i < totalSamples; i++) {
    while (next < ordered.length && ordered[next].sample <= i) {
      rampFrom = gain;
      rampStart = i;
      target = Math.min(1, Math.max(0, ordered[next].gain));
      next++;
    }
    if (rampStart >= 0) {
      const progress = rampSamples <= 0 ? 1 : Math.min(1, (i - rampStart) / rampSamples);
      gain = rampFrom + (target - rampFrom) * progress;
    }
    out[i] = gain * loop[i % loop.length];
  }
  return out;
}

export function rms(samples: ArrayLike<number>): number {
  let sum = 0;
  for (let i = 0; i < samples.length; i++) {
    sum += samples[i] * samples[i];
  }
  return Math.sqrt(sum / samples.length);
}

/**
 * Seamless loop playback of one preset asset through a ramped gain
 * node. Pen switches are applied at the next loop boundary so the
 * texture never jumps mid-cycle.
 */
export class LoopPlayer {
  private source: AudioBufferSourceNode | null = null;
  private buffer: AudioBuffer | null = null;
  private startedAt = 0;
  private readonly gainNode: GainNode;
  private pendingSwap: AudioBuffer | null = null;

  constructor(private readonly ctx: AudioContext, initialGain = 0) {
    this.gainNode = ctx.createGain();
    this.gainNode.gain.value = initialGain;
    this.gainNode.connect(ctx.destination);
  }

  async load(url: string): Promise<void> {
    const response = await fetch(url);
    if (!response.ok) {
      throw new Error(`asset fetch failed: ${url} (${response.status})`);
    }
    const encoded = await response.arrayBuffer();
    const decoded = await this.ctx.decodeAudioData(encoded);
    if (this.source === null) {
      this.buffer = decoded;
    } else {
      this.swapAtNextBoundary(decoded);
    }
  }

  start(): void {
    if (this.buffer === null || this.source !== null) {
      return;
    }
    this.startLooping(this.buffer, this.ctx.currentTime);
  }

  /** Gain target, approached over rampMs (20 ms for live updates). */
  setGain(gain: number, rampMs: number = GAIN_RAMP_MS): void {
    const clamped = Math.min(1, Math.max(0, gain));
    const now = this.ctx.currentTime;
    const param = this.gainNode.gain;
    param.cancelScheduledValues(now);
    param.setValueAtTime(param.value, now);
    param.linearRampToValueAtTime(clamped, now + rampMs / 1000);
  }

  swapAtNextBoundary(buffer: AudioBuffer): void {
    if (this.source === null || this.buffer === null) {
      this.buffer = buffer;
      return;
    }
    this.pendingSwap = buffer;
    const period = this.buffer.duration;
    const elapsed = this.ctx.currentTime - this.startedAt;
    const boundary = this.startedAt + Math.ceil(elapsed / period) * period;
    const old = this.source;
    old.onended = null;
    old.stop(boundary);
    const swap = () => {
      if (this.pendingSwap !== null) {
        const next = this.pendingSwap;
        this.pendingSwap = null;
        this.source = null;
        this.startLooping(next, boundary);
      }
    };
    old.onended = swap;
  }

  stop(): void {
    if (this.source !== null) {
      this.source.onended = null;
      this.source.stop();
      this.source = null;
    }
  }

  private startLooping(buffer: AudioBuffer, when: number): void {
    this.buffer = buffer;
    const source = this.ctx.createBufferSource();
    source.buffer = buffer;
    source.loop = true;
    source.connect(this.gainNode);
    source.start(when);
    this.startedAt = when;
    this.source = source;
  }
}
